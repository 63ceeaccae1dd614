#include "docrec/readorder.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "docrec/error.hpp"

namespace docrec {

void check(const OrderConfig& cfg) {
  if (!(cfg.min_gap > 0.0) || !std::isfinite(cfg.min_gap)) {
    throw DomainError("OrderConfig.min_gap must be positive");
  }
  if (!(cfg.y_tolerance >= 0.0) || !std::isfinite(cfg.y_tolerance)) {
    throw DomainError("OrderConfig.y_tolerance must be non-negative");
  }
}

namespace {

using Indices = std::vector<std::size_t>;

// Geometry-only ordering key; identical boxes fall back to input index.
auto geometry_key(const BoundingBox& b) { return std::make_tuple(b.y_min, b.x_min, b.y_max, b.x_max); }

Indices band_sort(std::span<const BoundingBox> boxes, Indices idx, double tol) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = geometry_key(boxes[a]);
    const auto kb = geometry_key(boxes[b]);
    return ka != kb ? ka < kb : a < b;
  });
  std::vector<std::size_t> band(boxes.size(), 0);
  std::size_t current = 0;
  double anchor = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double y = boxes[idx[k]].y_min;
    if (k == 0) {
      anchor = y;
    } else if (y - anchor > tol) {
      ++current;
      anchor = y;
    }
    band[idx[k]] = current;
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (band[a] != band[b]) return band[a] < band[b];
    return boxes[a].x_min < boxes[b].x_min;
  });
  return idx;
}

// Splits `idx` into groups separated by projection gaps >= min_gap along one
// axis. Closed intervals: touching boxes stay together.
std::vector<Indices> split(std::span<const BoundingBox> boxes, Indices idx, bool vertical_axis,
                           double min_gap) {
  auto lo = [&](std::size_t i) { return vertical_axis ? boxes[i].y_min : boxes[i].x_min; };
  auto hi = [&](std::size_t i) { return vertical_axis ? boxes[i].y_max : boxes[i].x_max; };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (lo(a) != lo(b)) return lo(a) < lo(b);
    const auto ka = geometry_key(boxes[a]);
    const auto kb = geometry_key(boxes[b]);
    return ka != kb ? ka < kb : a < b;
  });
  std::vector<Indices> groups;
  double reach = 0.0;
  for (std::size_t i : idx) {
    if (groups.empty() || lo(i) - reach >= min_gap) {
      groups.emplace_back();
      reach = hi(i);
    } else {
      reach = std::max(reach, hi(i));
    }
    groups.back().push_back(i);
  }
  return groups;
}

void cut(std::span<const BoundingBox> boxes, Indices idx, const OrderConfig& cfg, Indices& out) {
  if (idx.size() <= 1) {
    out.insert(out.end(), idx.begin(), idx.end());
    return;
  }
  for (bool vertical_axis : {true, false}) {
    auto groups = split(boxes, idx, vertical_axis, cfg.min_gap);
    if (groups.size() > 1) {
      for (auto& g : groups) cut(boxes, std::move(g), cfg, out);
      return;
    }
  }
  auto rest = band_sort(boxes, std::move(idx), cfg.y_tolerance);
  out.insert(out.end(), rest.begin(), rest.end());
}

}  // namespace

std::vector<std::size_t> xy_cut_order(std::span<const BoundingBox> boxes, const OrderConfig& cfg) {
  check(cfg);
  Indices idx(boxes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Indices out;
  out.reserve(boxes.size());
  cut(boxes, std::move(idx), cfg, out);
  return out;
}

std::vector<std::size_t> fallback_sort(std::span<const BoundingBox> boxes, double y_tolerance) {
  if (!(y_tolerance >= 0.0)) throw DomainError("fallback_sort: y_tolerance must be non-negative");
  Indices idx(boxes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return band_sort(boxes, std::move(idx), y_tolerance);
}

Document order_document(const Document& doc, const OrderConfig& cfg) {
  std::vector<BoundingBox> boxes;
  boxes.reserve(doc.elements.size());
  for (const auto& e : doc.elements) boxes.push_back(e.bbox);
  Document out{doc.page_width, doc.page_height, {}};
  out.elements.reserve(doc.elements.size());
  for (std::size_t i : xy_cut_order(boxes, cfg)) out.elements.push_back(doc.elements[i]);
  return out;
}

}  // namespace docrec
