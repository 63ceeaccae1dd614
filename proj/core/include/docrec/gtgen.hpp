#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docrec/model.hpp"
#include "docrec/readorder.hpp"

namespace docrec {

/// Text line from OCR or PDF extraction, not yet owned by an element.
struct RawLine {
  BoundingBox bbox;
  std::string text;
};

struct AssocConfig {
  double iou_threshold = 0.5;    // minimum share of a line's area inside its element
  double fuzzy_threshold = 0.9;  // minimum fuzzy_match against a reference transcription
};

void check(const AssocConfig& cfg);

/// Layout element before content assembly. `content` carries externally
/// produced table/formula content; `reference` is an optional expected
/// paragraph transcription checked with fuzzy_match().
struct ElementSeed {
  Category category = Category::Paragraph;
  BoundingBox bbox;
  std::optional<Transcription> content;
  std::optional<std::string> reference;
};

/// area(line ∩ element) / area(line); a zero-area line scores 1 when it lies
/// inside the element and 0 otherwise.
double overlap_ratio(const BoundingBox& line, const BoundingBox& element);

/// For each line, the element with the highest overlap_ratio when that ratio
/// reaches cfg.iou_threshold. Ties prefer the smaller element, then the lower
/// index.
std::vector<std::optional<std::size_t>> associate_lines(std::span<const BoundingBox> elements,
                                                        std::span<const RawLine> lines,
                                                        const AssocConfig& cfg = {});

/// Tight union; throws DomainError on an empty list.
BoundingBox merge_boxes(std::span<const BoundingBox> boxes);

/// 1 - Dist/Maxlen after lowercasing, collapsing whitespace runs and
/// trimming; 1 when both normalize to empty.
double fuzzy_match(std::string_view a, std::string_view b);

/// Lowercase ASCII, whitespace runs collapsed to one space, trimmed.
std::string normalize_for_matching(std::string_view s);

struct ReferenceMismatch {
  std::size_t element = 0;  // index in the assembled document
  double similarity = 0.0;
};

struct GroundTruth {
  Document document;
  /// For each input line, the index of the element holding it.
  std::vector<std::optional<std::size_t>> line_owner;
  /// Input line indices that no element claimed.
  std::vector<std::size_t> unassigned;
  std::vector<ReferenceMismatch> mismatched;
};

/// Builds an ordered document: elements sorted by xy_cut_order(); lines
/// associated to elements; paragraphs that share a straddling line are
/// consolidated into one element with merge_boxes(); paragraph lines ordered
/// with fallback_sort(). Lines landing in non-paragraph elements are owned
/// by that element but not copied into its content. Throws DomainError for
/// seeds whose content does not fit their category and ValidationError when
/// the result breaks a document invariant.
GroundTruth assemble_ground_truth(double page_width, double page_height,
                                  std::span<const ElementSeed> elements, std::span<const RawLine> lines,
                                  const OrderConfig& order_cfg = {}, const AssocConfig& assoc_cfg = {});

}  // namespace docrec
