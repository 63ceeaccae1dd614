#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "docrec/model.hpp"

namespace docrec {

struct OrderConfig {
  double min_gap = 5.0;       // whitespace (px) that separates two regions
  double y_tolerance = 10.0;  // y_min band (px) treated as one row by the fallback
};

/// Throws DomainError unless min_gap > 0 and y_tolerance >= 0.
void check(const OrderConfig& cfg);

/// Reading order by recursive XY-cut. A region is split top/bottom at every
/// horizontal whitespace gap of at least min_gap; failing that, left/right at
/// vertical gaps; regions with neither fall back to fallback_sort().
/// Returns a permutation of input indices that depends on geometry only.
std::vector<std::size_t> xy_cut_order(std::span<const BoundingBox> boxes, const OrderConfig& cfg = {});

/// Row-banded sort. Boxes are visited by ascending y_min; a box joins the
/// current band when its y_min is within y_tolerance of the band's first
/// y_min, otherwise it opens a new band. Output is band order, then x_min.
std::vector<std::size_t> fallback_sort(std::span<const BoundingBox> boxes, double y_tolerance);

/// Copy of `doc` with elements permuted into xy_cut_order().
Document order_document(const Document& doc, const OrderConfig& cfg = {});

}  // namespace docrec
