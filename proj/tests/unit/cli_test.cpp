#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "docrec/json_io.hpp"

namespace docrec {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kFixtures = DOCREC_FIXTURES;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int status = cli::run(args, in, out, err);
  return {status, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("docrec_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name, std::ios::binary) << text;
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

std::string gt_path() { return (kFixtures / "gt.jsonl").string(); }
std::string pred_path() { return (kFixtures / "pred.jsonl").string(); }

json manifest() {
  std::ifstream f(kFixtures / "manifest.json");
  return json::parse(f);
}

TEST(CliEvalTest, IdenticalCorporaScoreOne) {
  const Result r = run({"eval", "--metric", "dsm", "--gt", gt_path(), "--pred", gt_path()});
  ASSERT_EQ(r.status, cli::kOk) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["dsm"], 1.0);
  EXPECT_EQ(report["corpus_size"], 10);
  EXPECT_FALSE(report.contains("ned"));
  EXPECT_NE(r.out.find("\"dsm\":1.0000"), std::string::npos);
}

TEST(CliEvalTest, FixtureMatchesManifest) {
  const json m = manifest();
  const Result r = run({"eval", "--gt", gt_path(), "--pred", pred_path()});
  ASSERT_EQ(r.status, cli::kOk) << r.err;
  const json report = json::parse(r.out);
  char dsm[16], ned[16];
  std::snprintf(dsm, sizeof dsm, "%.4f", m["dsm"].get<double>());
  std::snprintf(ned, sizeof ned, "%.4f", m["ned"].get<double>());
  EXPECT_NE(r.out.find(std::string("\"dsm\":") + dsm), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(std::string("\"ned\":") + ned), std::string::npos) << r.out;
  ASSERT_EQ(report["per_document"].size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(report["per_document"][i]["normalized"].get<double>(),
                m["per_document"][i]["normalized"].get<double>(), 5e-5);
  }
}

TEST(CliEvalTest, DeterministicAcrossJobCounts) {
  const Result a = run({"eval", "--gt", gt_path(), "--pred", pred_path(), "-j", "1"});
  const Result b = run({"eval", "--gt", gt_path(), "--pred", pred_path(), "-j", "4"});
  ASSERT_EQ(a.status, cli::kOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliEvalTest, KeyAlignment) {
  TempDir tmp;
  std::ifstream f(pred_path());
  std::vector<std::string> lines;
  for (std::string line; std::getline(f, line);) lines.push_back(line);
  std::string reversed;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) reversed += *it + "\n";
  const std::string shuffled = tmp.write("pred.jsonl", reversed);
  const Result by_key = run({"eval", "--gt", gt_path(), "--pred", shuffled, "--key", "id"});
  const Result by_line = run({"eval", "--gt", gt_path(), "--pred", pred_path()});
  ASSERT_EQ(by_key.status, cli::kOk) << by_key.err;
  EXPECT_EQ(by_key.out, by_line.out);
}

TEST(CliEvalTest, LengthMismatch) {
  TempDir tmp;
  std::ifstream f(pred_path());
  std::string first;
  std::getline(f, first);
  const std::string one = tmp.write("one.jsonl", first + "\n");
  const Result r = run({"eval", "--gt", gt_path(), "--pred", one});
  EXPECT_EQ(r.status, cli::kFailure);
  EXPECT_NE(r.err.find("corpus length mismatch"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliEvalTest, MalformedInputNamesLine) {
  TempDir tmp;
  const std::string bad = tmp.write("bad.jsonl", R"({"page_width":10,"page_height":10,"elements":[]})"
                                                 "\n\n{not json\n");
  const Result r = run({"eval", "--gt", bad, "--pred", bad});
  EXPECT_EQ(r.status, cli::kFailure);
  EXPECT_NE(r.err.find("bad.jsonl:3:"), std::string::npos) << r.err;
}

TEST(CliUsageTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).status, cli::kUsage);
  EXPECT_EQ(run({"eval", "--gt", gt_path()}).status, cli::kUsage);
  EXPECT_EQ(run({"eval", "--gt", gt_path(), "--pred", gt_path(), "--metric", "bleu"}).status, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).status, cli::kUsage);
  EXPECT_EQ(run({"--help"}).status, cli::kOk);
}

TEST(CliValidateTest, CountsValidAndInvalid) {
  const std::string good = R"({"page_width":10,"page_height":10,"elements":[{"category":"Figure","bbox":[0,0,5,5]}]})";
  const std::string bad = R"({"page_width":10,"page_height":10,"elements":[{"category":"Figure","bbox":[6,0,5,5]}]})";
  Result r = run({"validate", "-i", "-"}, good + "\n" + bad + "\n");
  EXPECT_EQ(r.status, cli::kFailure);
  EXPECT_EQ(r.out, "{\"documents\":2,\"valid\":1,\"invalid\":1}\n");
  EXPECT_NE(r.err.find("-:2:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("element 0"), std::string::npos) << r.err;

  r = run({"validate", "-i", gt_path()});
  EXPECT_EQ(r.status, cli::kOk) << r.err;
}

TEST(CliValidateTest, TokenInput) {
  Result r = run({"validate", "-i", "-", "--format", "tokens", "--page-width", "100", "--page-height", "100"},
                 "<Figure><0><0><999><999><Sep>\n");
  EXPECT_EQ(r.status, cli::kOk) << r.err;
  r = run({"validate", "-i", "-", "--format", "tokens", "--page-width", "100", "--page-height", "100"},
          "<Chart><0><0><999><999><Sep>");
  EXPECT_EQ(r.status, cli::kFailure);
  EXPECT_NE(r.err.find("Chart"), std::string::npos) << r.err;
}

TEST(CliConvertTest, MarkdownAndLayout) {
  const std::string doc =
      R"({"page_width":100,"page_height":100,"elements":[)"
      R"({"category":"Paragraph","bbox":[0,0,50,20],"content":{"lines":[{"bbox":[0,0,50,10],"text":"Hello"},{"bbox":[0,10,50,20],"text":"world"}]}},)"
      R"({"category":"Formula","bbox":[0,30,50,40],"content":{"latex":"E=mc^2"}}]})";
  Result r = run({"convert", "-i", "-", "--to", "markdown"}, doc + "\n");
  ASSERT_EQ(r.status, cli::kOk) << r.err;
  EXPECT_EQ(r.out, "\"Hello\\nworld\\n\\nE=mc^2\"\n");
  r = run({"convert", "-i", "-", "--to", "markdown", "--raw"}, doc + "\n");
  EXPECT_EQ(r.out, "Hello\nworld\n\nE=mc^2\n");
  r = run({"convert", "-i", "-", "--to", "formulas"}, doc + "\n");
  EXPECT_EQ(r.out, "[\"E=mc^2\"]\n");
  r = run({"convert", "-i", "-", "--to", "layout"}, doc + "\n");
  const json layout = json::parse(r.out);
  ASSERT_EQ(layout.size(), 2u);
  EXPECT_EQ(layout[1]["category"], "Formula");
  EXPECT_EQ(layout[1]["score"], 1.0);
}

TEST(CliOrderTest, ReordersAndRoundTrips) {
  const std::string doc =
      R"({"id":7,"page_width":100,"page_height":100,"elements":[)"
      R"({"category":"Figure","bbox":[0,60,50,80]},{"category":"Figure","bbox":[0,0,50,20]}]})";
  const Result r = run({"order", "-i", "-"}, doc + "\n");
  ASSERT_EQ(r.status, cli::kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["id"], 7);
  EXPECT_EQ(j["elements"][0]["bbox"][1], 0);
  // reading it back and ordering again changes nothing
  EXPECT_EQ(run({"order", "-i", "-"}, r.out).out, r.out);
  EXPECT_NO_THROW(document_from_json(j));
}

TEST(CliGtgenTest, AssemblesDocument) {
  const std::string input =
      R"({"id":"p1","page_width":600,"page_height":400,)"
      R"("elements":[{"category":"Paragraph","bbox":[0,200,500,300]},{"category":"Paragraph","bbox":[0,0,500,150],"reference":"first second"}],)"
      R"("lines":[{"bbox":[10,210,400,230],"text":"third"},{"bbox":[10,60,400,80],"text":"second"},)"
      R"({"bbox":[10,10,400,30],"text":"first"},{"bbox":[550,350,590,390],"text":"stray"}]})";
  const Result r = run({"gtgen", "-i", "-"}, input + "\n");
  ASSERT_EQ(r.status, cli::kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["id"], "p1");
  const Document d = document_from_json(j);
  ASSERT_EQ(d.elements.size(), 2u);
  EXPECT_EQ(transcription_text(d.elements[0]), "first\nsecond");
  ASSERT_EQ(j["unassigned"].size(), 1u);
  EXPECT_EQ(j["unassigned"][0]["index"], 3);
  EXPECT_TRUE(j["mismatched"].empty());
}

TEST(CliOutputTest, WritesOutputFile) {
  TempDir tmp;
  const std::string path = tmp.write("report.json", "");
  const Result r = run({"eval", "--gt", gt_path(), "--pred", pred_path(), "-o", path});
  ASSERT_EQ(r.status, cli::kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), run({"eval", "--gt", gt_path(), "--pred", pred_path()}).out);
}

}  // namespace
}  // namespace docrec
