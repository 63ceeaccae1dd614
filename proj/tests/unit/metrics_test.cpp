#include <gtest/gtest.h>

#include <cmath>

#include "docrec/error.hpp"
#include "docrec/metrics.hpp"
#include "docrec/utf8.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace docrec {
namespace {

Element formula(BoundingBox b, std::string latex) { return {Category::Formula, b, FormulaContent{std::move(latex)}}; }
Element figure(BoundingBox b) { return {Category::Figure, b, FigureContent{}}; }

TEST(IouTest, Examples) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, {20, 20, 30, 30}), 0.0);
  EXPECT_NEAR(iou(a, {5, 5, 15, 15}), 25.0 / 175.0, 1e-15);
  EXPECT_DOUBLE_EQ(iou({1, 1, 1, 1}, {1, 1, 1, 1}), 0.0);
}

TEST(EditDistanceTest, Examples) {
  EXPECT_EQ(edit_distance(std::string_view("abc"), std::string_view("abc")), 0u);
  EXPECT_EQ(edit_distance(std::string_view(""), std::string_view("abc")), 3u);
  EXPECT_EQ(edit_distance(std::string_view("kitten"), std::string_view("sitting")), 3u);
  EXPECT_EQ(testing::recursive_edit_distance(U"kitten", U"sitting"), 3u);
  // codepoints, not bytes
  EXPECT_EQ(edit_distance(std::string_view("中文"), std::string_view("中")), 1u);
}

TEST(EditDistanceTest, MatchesRecursiveOracle) {
  testing::Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::u32string a, b;
    const int la = testing::uniform_int(rng, 0, 7), lb = testing::uniform_int(rng, 0, 7);
    for (int i = 0; i < la; ++i) a += static_cast<char32_t>(U'a' + testing::uniform_int(rng, 0, 2));
    for (int i = 0; i < lb; ++i) b += static_cast<char32_t>(U'a' + testing::uniform_int(rng, 0, 2));
    EXPECT_EQ(edit_distance(a, b), testing::recursive_edit_distance(a, b));
  }
}

TEST(EditDistanceTest, MetricAxioms) {
  testing::Rng rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string a = testing::random_text(rng, 10), b = testing::random_text(rng, 10),
                      c = testing::random_text(rng, 10);
    const auto ab = edit_distance(a, b), ba = edit_distance(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_LE(ab, std::max(utf8::length(a), utf8::length(b)));
    EXPECT_LE(edit_distance(a, c), ab + edit_distance(b, c));
    EXPECT_EQ(edit_distance(a, a), 0u);
  }
}

TEST(ElementCostTest, LocationCost) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(location_cost(formula(a, "x"), formula(a, "y")), 0.0);
  EXPECT_DOUBLE_EQ(location_cost(formula(a, "x"), figure({20, 20, 30, 30})), 1.0);
  EXPECT_NEAR(location_cost(formula(a, ""), formula({5, 5, 15, 15}, "")), 3.0 / 7.0, 1e-15);
}

TEST(ElementCostTest, TranscriptionCost) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(transcription_cost(formula(a, "xy"), formula(a, "xy")), 0.0);
  EXPECT_DOUBLE_EQ(transcription_cost(figure(a), figure(a)), 0.0);
  EXPECT_DOUBLE_EQ(transcription_cost(formula(a, "ab"), formula(a, "b")), 0.5);
  EXPECT_DOUBLE_EQ(transcription_cost(formula(a, "ab"), figure(a)), 1.0);
}

TEST(ElementCostTest, Total) {
  const BoundingBox a{0, 0, 10, 10};
  // same category, IoU 1/2 -> location (0 + 1/2) / 2 = 0.25; "ab" vs "b" -> 0.5
  const auto c = element_cost(formula(a, "ab"), formula({0, 0, 10, 5}, "b"));
  EXPECT_DOUBLE_EQ(c.location_cost, 0.25);
  EXPECT_DOUBLE_EQ(c.transcription_cost, 0.5);
  EXPECT_DOUBLE_EQ(c.total, 0.375);
  // different category, disjoint, empty vs "x": 1 and 1
  EXPECT_DOUBLE_EQ(element_cost(figure(a), formula({20, 20, 30, 30}, "x")).total, 1.0);
  // 0.75 location with 0.5 transcription
  const auto d = element_cost(formula(a, "ab"), figure({0, 0, 10, 5}));
  EXPECT_DOUBLE_EQ(d.location_cost, 0.75);
  EXPECT_DOUBLE_EQ(d.transcription_cost, 1.0);
  const auto e = element_cost(formula(a, "ab"), Element{Category::Paragraph, {0, 0, 10, 5},
                                                        ParagraphContent{{{{0, 0, 10, 5}, "b"}}}});
  EXPECT_DOUBLE_EQ(e.location_cost, 0.75);
  EXPECT_DOUBLE_EQ(e.transcription_cost, 0.5);
  EXPECT_DOUBLE_EQ(e.total, 0.625);
}

CostGrid grid_of(const std::vector<std::vector<double>>& v) {
  CostGrid g{v.size(), v.front().size(), {}};
  for (const auto& row : v) g.values.insert(g.values.end(), row.begin(), row.end());
  return g;
}

TEST(AccumulatedDistanceTest, HandFilledGrids) {
  EXPECT_DOUBLE_EQ(accumulated_distance(grid_of({{0.625}})), 0.625);
  const std::vector<std::vector<double>> two = {{0.5, 0.1}, {0.9, 0.125}};
  EXPECT_DOUBLE_EQ(accumulated_distance(grid_of(two)), testing::min_monotone_path(two));
  EXPECT_DOUBLE_EQ(accumulated_distance(grid_of(two)), 0.625);
  EXPECT_THROW(accumulated_distance(CostGrid{}), EmptyDocumentError);
}

TEST(AccumulatedDistanceTest, MatchesPathEnumeration) {
  testing::Rng rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = testing::uniform_int(rng, 1, 5), kt = testing::uniform_int(rng, 1, 5);
    std::vector<std::vector<double>> cost(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(kt)));
    for (auto& row : cost)
      for (auto& c : row) c = testing::uniform_int(rng, 0, 8) / 8.0;  // dyadic: sums are exact
    EXPECT_EQ(accumulated_distance(grid_of(cost)), testing::min_monotone_path(cost));
  }
}

Document two_formulas() {
  return {100, 100, {formula({0, 0, 10, 10}, "ab"), formula({0, 20, 10, 30}, "cd")}};
}

TEST(DocumentDistanceTest, IdentityIsZero) {
  testing::Rng rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const Document d = testing::random_document(rng, 1, 6);
    EXPECT_EQ(document_distance(d, d), 0.0);
  }
}

TEST(DsmTest, Examples) {
  const Document gt = two_formulas();
  // D = 0.625 over K = K~ = 2: one unit of cost on the first element, ...
  Document pred = gt;
  pred.elements[0] = Element{Category::Paragraph, {0, 0, 10, 5}, ParagraphContent{{{{0, 0, 10, 5}, "b"}}}};
  ASSERT_DOUBLE_EQ(document_distance(gt, pred), 0.625);
  const std::vector<Document> g{gt}, p{pred};
  EXPECT_DOUBLE_EQ(dsm(g, p), 1.0 - 0.625 / 2.0);
  EXPECT_DOUBLE_EQ(dsm(g, g), 1.0);
}

TEST(DsmTest, EmptyDocuments) {
  const Document empty{100, 100, {}};
  const auto both = score_document(empty, empty);
  EXPECT_EQ(both.normalized, 0.0);
  const auto one = score_document(empty, two_formulas());
  EXPECT_EQ(one.distance, 2.0);
  EXPECT_EQ(one.max_len, 2u);
  EXPECT_EQ(one.normalized, 1.0);
  EXPECT_EQ(score_document(two_formulas(), empty).normalized, 1.0);
}

TEST(DsmTest, Errors) {
  const std::vector<Document> one{two_formulas()}, none;
  EXPECT_THROW(evaluate(one, none), DomainError);
  EXPECT_THROW(evaluate(none, none), DomainError);
}

TEST(DsmTest, SymmetryAndBounds) {
  testing::Rng rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const Document a = testing::random_document(rng, 0, 6);
    Document b = testing::random_document(rng, 0, 6);
    b.page_width = a.page_width;
    b.page_height = a.page_height;
    const auto ab = score_document(a, b), ba = score_document(b, a);
    EXPECT_NEAR(ab.distance, ba.distance, 1e-12);
    EXPECT_GE(ab.normalized, 0.0);
    EXPECT_LE(ab.normalized, 1.0);
  }
}

TEST(DsmTest, ParallelMatchesSerial) {
  testing::Rng rng(36);
  const auto gt = testing::random_corpus(rng, 20, 20, 0, 5);
  const auto pred = testing::random_corpus(rng, 20, 20, 0, 5);
  const auto serial = evaluate(gt, pred, {true, true, 1});
  const auto parallel = evaluate(gt, pred, {true, true, 4});
  EXPECT_EQ(serial.dsm, parallel.dsm);
  EXPECT_EQ(serial.ned, parallel.ned);
  EXPECT_EQ(serial.corpus_size, 20u);
}

TEST(NedTest, Examples) {
  EXPECT_DOUBLE_EQ(ned_similarity("same", "same"), 1.0);
  EXPECT_DOUBLE_EQ(ned_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(ned_similarity("ab", ""), 0.0);
  EXPECT_DOUBLE_EQ(ned_similarity("abcd", "abed"), 0.75);
}

}  // namespace
}  // namespace docrec
