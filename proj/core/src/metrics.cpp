#include "docrec/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "docrec/convert.hpp"
#include "docrec/error.hpp"
#include "docrec/parallel.hpp"
#include "docrec/utf8.hpp"

namespace docrec {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, subst});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(utf8::decode(a), utf8::decode(b));
}

namespace {

double normalized_distance(std::string_view a, std::string_view b) {
  const auto ua = utf8::decode(a);
  const auto ub = utf8::decode(b);
  const std::size_t maxlen = std::max(ua.size(), ub.size());
  if (maxlen == 0) return 0.0;
  return static_cast<double>(edit_distance(ua, ub)) / static_cast<double>(maxlen);
}

}  // namespace

double location_cost(const Element& gt, const Element& pred) {
  const double category = gt.category == pred.category ? 0.0 : 1.0;
  return (category + (1.0 - iou(gt.bbox, pred.bbox))) / 2.0;
}

double transcription_cost(const Element& gt, const Element& pred) {
  return normalized_distance(transcription_text(gt), transcription_text(pred));
}

ElementCostBreakdown element_cost(const Element& gt, const Element& pred) {
  ElementCostBreakdown c;
  c.location_cost = location_cost(gt, pred);
  c.transcription_cost = transcription_cost(gt, pred);
  c.total = (c.location_cost + c.transcription_cost) / 2.0;
  return c;
}

CostGrid element_cost_grid(const Document& gt, const Document& pred) {
  CostGrid grid{gt.elements.size(), pred.elements.size(), {}};
  grid.values.resize(grid.rows * grid.cols);

  // decode every transcription once; the grid reuses them K~ and K times
  auto decode_all = [](const Document& d) {
    std::vector<std::u32string> out;
    out.reserve(d.elements.size());
    for (const auto& e : d.elements) out.push_back(utf8::decode(transcription_text(e)));
    return out;
  };
  const auto gt_text = decode_all(gt);
  const auto pred_text = decode_all(pred);

  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      const double loc = location_cost(gt.elements[i], pred.elements[j]);
      const std::size_t maxlen = std::max(gt_text[i].size(), pred_text[j].size());
      const double tran = maxlen == 0 ? 0.0
                                      : static_cast<double>(edit_distance(gt_text[i], pred_text[j])) /
                                            static_cast<double>(maxlen);
      grid.values[i * grid.cols + j] = (loc + tran) / 2.0;
    }
  }
  return grid;
}

double accumulated_distance(const CostGrid& grid) {
  if (grid.rows == 0 || grid.cols == 0) throw EmptyDocumentError("document_distance: empty document");
  std::vector<double> prev(grid.cols);
  std::vector<double> cur(grid.cols);
  prev[0] = grid(0, 0);
  for (std::size_t j = 1; j < grid.cols; ++j) prev[j] = prev[j - 1] + grid(0, j);
  for (std::size_t i = 1; i < grid.rows; ++i) {
    cur[0] = prev[0] + grid(i, 0);
    for (std::size_t j = 1; j < grid.cols; ++j) {
      cur[j] = std::min({prev[j], cur[j - 1], prev[j - 1]}) + grid(i, j);
    }
    std::swap(prev, cur);
  }
  return prev[grid.cols - 1];
}

double document_distance(const Document& gt, const Document& pred) {
  if (gt.elements.empty() || pred.elements.empty()) {
    throw EmptyDocumentError("document_distance: empty document");
  }
  return accumulated_distance(element_cost_grid(gt, pred));
}

DocumentScore score_document(const Document& gt, const Document& pred) {
  DocumentScore s;
  s.max_len = std::max(gt.elements.size(), pred.elements.size());
  if (s.max_len == 0) return s;
  if (gt.elements.empty() || pred.elements.empty()) {
    s.distance = static_cast<double>(s.max_len);
  } else {
    s.distance = document_distance(gt, pred);
  }
  s.normalized = s.distance / static_cast<double>(s.max_len);
  return s;
}

double ned_similarity(std::string_view gt, std::string_view pred) {
  return 1.0 - normalized_distance(gt, pred);
}

EvalReport evaluate(std::span<const Document> gt, std::span<const Document> pred,
                    const EvalOptions& options) {
  if (gt.size() != pred.size()) throw DomainError("corpus length mismatch");
  if (gt.empty()) throw DomainError("empty corpus");

  EvalReport report;
  report.corpus_size = gt.size();
  std::vector<double> ned(gt.size(), 0.0);
  if (options.with_dsm) report.per_document.resize(gt.size());

  parallel_for(gt.size(), options.jobs, [&](std::size_t i) {
    if (options.with_dsm) report.per_document[i] = score_document(gt[i], pred[i]);
    if (options.with_ned) ned[i] = ned_similarity(to_markdown(gt[i]), to_markdown(pred[i]));
  });

  const double b = static_cast<double>(gt.size());
  if (options.with_dsm) {
    double sum = 0.0;
    for (const auto& s : report.per_document) sum += s.normalized;
    report.dsm = 1.0 - sum / b;
  }
  if (options.with_ned) {
    double sum = 0.0;
    for (double v : ned) sum += v;
    report.ned = sum / b;
  }
  return report;
}

double dsm(std::span<const Document> gt, std::span<const Document> pred) {
  return evaluate(gt, pred, {true, false, 1}).dsm;
}

}  // namespace docrec
