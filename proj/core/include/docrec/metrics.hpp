#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "docrec/model.hpp"

namespace docrec {

/// Intersection over union; 0 when the union has zero area.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Levenshtein distance over Unicode codepoints (unit costs).
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);
/// UTF-8 overload; throws FormatError on invalid input.
std::size_t edit_distance(std::string_view a, std::string_view b);

struct ElementCostBreakdown {
  double location_cost = 0.0;
  double transcription_cost = 0.0;
  double total = 0.0;
};

/// [1{categories differ} + (1 - IoU)] / 2.
double location_cost(const Element& gt, const Element& pred);

/// Dist / Maxlen over transcription_text(); 0 when both are empty.
double transcription_cost(const Element& gt, const Element& pred);

ElementCostBreakdown element_cost(const Element& gt, const Element& pred);

/// Row-major K x K~ matrix of element costs (gt rows, prediction columns).
struct CostGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

CostGrid element_cost_grid(const Document& gt, const Document& pred);

class EmptyDocumentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Monotone alignment over a cost grid:
///   D(i,j) = min(D(i-1,j), D(i,j-1), D(i-1,j-1)) + Cost(i,j)
/// with the first row and column accumulating along the edge. Returns D(K,K~).
/// Throws EmptyDocumentError for an empty grid.
double accumulated_distance(const CostGrid& grid);

/// accumulated_distance over element_cost_grid(gt, pred).
double document_distance(const Document& gt, const Document& pred);

struct DocumentScore {
  double distance = 0.0;
  std::size_t max_len = 0;
  double normalized = 0.0;  // distance / max_len, 0 when both documents are empty
};

/// Per-document term of the similarity metric. Empty against non-empty
/// scores distance K (one unit per unmatched element); empty against empty
/// scores 0.
DocumentScore score_document(const Document& gt, const Document& pred);

/// 1 - Dist/Maxlen over codepoints; 1 when both strings are empty.
double ned_similarity(std::string_view gt, std::string_view pred);

struct EvalReport {
  std::vector<DocumentScore> per_document;
  double dsm = 0.0;
  double ned = 0.0;
  std::size_t corpus_size = 0;
};

struct EvalOptions {
  bool with_dsm = true;
  bool with_ned = true;
  unsigned jobs = 1;
};

/// Corpus evaluation over index-aligned documents. NED compares the
/// markdown renderings. Throws DomainError on empty or mismatched corpora.
EvalReport evaluate(std::span<const Document> gt, std::span<const Document> pred,
                    const EvalOptions& options = {});

/// DSM only: 1 - mean(D / Maxlen).
double dsm(std::span<const Document> gt, std::span<const Document> pred);

}  // namespace docrec
