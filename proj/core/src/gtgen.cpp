#include "docrec/gtgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "docrec/error.hpp"
#include "docrec/metrics.hpp"
#include "docrec/utf8.hpp"

namespace docrec {

void check(const AssocConfig& cfg) {
  if (!(cfg.iou_threshold > 0.0 && cfg.iou_threshold <= 1.0)) {
    throw DomainError("AssocConfig.iou_threshold must lie in (0, 1]");
  }
  if (!(cfg.fuzzy_threshold >= 0.0 && cfg.fuzzy_threshold <= 1.0)) {
    throw DomainError("AssocConfig.fuzzy_threshold must lie in [0, 1]");
  }
}

double overlap_ratio(const BoundingBox& line, const BoundingBox& element) {
  const double area = line.area();
  if (!(area > 0.0)) {
    const bool inside = line.x_min >= element.x_min && line.x_max <= element.x_max &&
                        line.y_min >= element.y_min && line.y_max <= element.y_max;
    return inside ? 1.0 : 0.0;
  }
  const double iw = std::min(line.x_max, element.x_max) - std::max(line.x_min, element.x_min);
  const double ih = std::min(line.y_max, element.y_max) - std::max(line.y_min, element.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return std::min(1.0, iw * ih / area);
}

std::vector<std::optional<std::size_t>> associate_lines(std::span<const BoundingBox> elements,
                                                        std::span<const RawLine> lines,
                                                        const AssocConfig& cfg) {
  check(cfg);
  std::vector<std::optional<std::size_t>> owner(lines.size());
  for (std::size_t l = 0; l < lines.size(); ++l) {
    double best = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const double r = overlap_ratio(lines[l].bbox, elements[e]);
      if (r < cfg.iou_threshold) continue;
      const bool better = !owner[l] || r > best ||
                          (r == best && elements[e].area() < elements[*owner[l]].area());
      if (better) {
        owner[l] = e;
        best = r;
      }
    }
  }
  return owner;
}

BoundingBox merge_boxes(std::span<const BoundingBox> boxes) {
  if (boxes.empty()) throw DomainError("merge_boxes: empty list");
  BoundingBox out = boxes.front();
  for (const auto& b : boxes.subspan(1)) {
    out.x_min = std::min(out.x_min, b.x_min);
    out.y_min = std::min(out.y_min, b.y_min);
    out.x_max = std::max(out.x_max, b.x_max);
    out.y_max = std::max(out.y_max, b.y_max);
  }
  return out;
}

std::string normalize_for_matching(std::string_view s) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

double fuzzy_match(std::string_view a, std::string_view b) {
  const auto ua = utf8::decode(normalize_for_matching(a));
  const auto ub = utf8::decode(normalize_for_matching(b));
  const std::size_t maxlen = std::max(ua.size(), ub.size());
  if (maxlen == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(ua, ub)) / static_cast<double>(maxlen);
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

Transcription seed_content(const ElementSeed& seed) {
  if (seed.category == Category::Paragraph) {
    if (seed.content) throw DomainError("paragraph content is assembled from lines");
    return ParagraphContent{};
  }
  if (!seed.content) return empty_content(seed.category);
  if (content_category(*seed.content) != seed.category) {
    throw DomainError("seed content does not match category " + std::string(to_string(seed.category)));
  }
  return *seed.content;
}

}  // namespace

GroundTruth assemble_ground_truth(double page_width, double page_height,
                                  std::span<const ElementSeed> elements, std::span<const RawLine> lines,
                                  const OrderConfig& order_cfg, const AssocConfig& assoc_cfg) {
  check(order_cfg);
  check(assoc_cfg);

  std::vector<BoundingBox> seed_boxes;
  for (const auto& s : elements) seed_boxes.push_back(s.bbox);
  auto owner = associate_lines(seed_boxes, lines, assoc_cfg);

  // A line that no single paragraph claims but that several paragraphs
  // cover together joins those paragraphs into one element.
  DisjointSets groups(elements.size());
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (owner[l]) continue;
    std::vector<std::size_t> covering;
    double total = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      if (elements[e].category != Category::Paragraph) continue;
      const double r = overlap_ratio(lines[l].bbox, elements[e].bbox);
      if (r > 0.0) {
        covering.push_back(e);
        total += r;
      }
    }
    if (covering.size() < 2 || total < assoc_cfg.iou_threshold) continue;
    for (std::size_t e : covering) groups.unite(covering.front(), e);
    owner[l] = covering.front();
  }

  // Consolidated elements, indexed by group root.
  std::vector<std::size_t> roots;
  std::vector<std::size_t> slot(elements.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    if (groups.find(e) == e) {
      slot[e] = roots.size();
      roots.push_back(e);
    }
  }
  std::vector<std::vector<BoundingBox>> member_boxes(roots.size());
  std::vector<std::optional<std::string>> references(roots.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const std::size_t s = slot[groups.find(e)];
    member_boxes[s].push_back(elements[e].bbox);
    if (elements[e].reference) {
      references[s] = references[s] ? *references[s] + " " + *elements[e].reference : *elements[e].reference;
    }
  }
  std::vector<Element> merged;
  for (std::size_t s = 0; s < roots.size(); ++s) {
    merged.push_back({elements[roots[s]].category, merge_boxes(member_boxes[s]), seed_content(elements[roots[s]])});
  }
  for (std::size_t e = 0; e < elements.size(); ++e) {
    if (groups.find(e) != e) seed_content(elements[e]);  // still reject bad seeds
  }

  std::vector<BoundingBox> merged_boxes;
  for (const auto& m : merged) merged_boxes.push_back(m.bbox);
  const auto order = xy_cut_order(merged_boxes, order_cfg);
  std::vector<std::size_t> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;

  GroundTruth gt;
  gt.document.page_width = page_width;
  gt.document.page_height = page_height;
  gt.line_owner.resize(lines.size());

  std::vector<std::vector<std::size_t>> owned(merged.size());
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (!owner[l]) {
      gt.unassigned.push_back(l);
      continue;
    }
    const std::size_t m = slot[groups.find(*owner[l])];
    owned[m].push_back(l);
    gt.line_owner[l] = position[m];
  }

  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t m = order[k];
    Element e = merged[m];
    if (auto* para = std::get_if<ParagraphContent>(&e.content)) {
      std::vector<BoundingBox> boxes;
      for (std::size_t l : owned[m]) boxes.push_back(lines[l].bbox);
      for (std::size_t i : fallback_sort(boxes, order_cfg.y_tolerance)) {
        const RawLine& line = lines[owned[m][i]];
        para->lines.push_back({line.bbox, line.text});
      }
      if (references[m]) {
        const double sim = fuzzy_match(transcription_text(e), *references[m]);
        if (sim < assoc_cfg.fuzzy_threshold) gt.mismatched.push_back({k, sim});
      }
    }
    gt.document.elements.push_back(std::move(e));
  }

  auto violations = validate_document(gt.document);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return gt;
}

}  // namespace docrec
