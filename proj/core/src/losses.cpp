#include "docrec/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "docrec/error.hpp"
#include "docrec/metrics.hpp"

namespace docrec {

namespace {

struct Solution {
  std::vector<std::size_t> assignment;  // position in `rows` -> column id
  std::vector<double> row_potential;    // indexed like `rows`
  std::vector<double> col_potential;    // indexed like `cols`
};

// Shortest augmenting path Kuhn-Munkres over the sub-matrix selected by
// `rows` x `cols` (rows.size() <= cols.size()). O(rows^2 * cols).
Solution solve(const Matrix& cost, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  const std::size_t n = rows.size();
  const std::size_t m = cols.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based; index 0 is the virtual source column / unmatched marker
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(rows[i0 - 1], cols[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Solution s;
  s.assignment.assign(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] != 0) s.assignment[match[j] - 1] = cols[j - 1];
  }
  s.row_potential.assign(u.begin() + 1, u.end());
  s.col_potential.assign(v.begin() + 1, v.end());
  return s;
}

bool close_enough(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

double safe_log(double p) { return std::log(std::max(p, kLogEpsilon)); }

}  // namespace

double assignment_cost(const Matrix& cost, const Assignment& assignment) {
  double total = 0.0;
  for (std::size_t k = 0; k < assignment.size(); ++k) total += cost(k, assignment[k]);
  return total;
}

Assignment hungarian_assign(const Matrix& cost) {
  if (cost.rows > cost.cols) throw DomainError("hungarian_assign: more targets than predictions");
  for (double c : cost.values) {
    if (!std::isfinite(c)) throw DomainError("hungarian_assign: non-finite cost");
  }
  if (cost.rows == 0) return {};

  std::vector<std::size_t> all_rows(cost.rows), all_cols(cost.cols);
  for (std::size_t i = 0; i < cost.rows; ++i) all_rows[i] = i;
  for (std::size_t j = 0; j < cost.cols; ++j) all_cols[j] = j;
  const Solution best = solve(cost, all_rows, all_cols);
  Assignment result = best.assignment;
  const double optimum = assignment_cost(cost, result);

  // Walk rows in order, moving each to the smallest column that still admits
  // an optimal completion. Only edges tight under the optimal dual can appear
  // in an optimal assignment, which prunes almost every candidate.
  std::vector<char> taken(cost.cols, 0);
  double prefix = 0.0;
  for (std::size_t k = 0; k < cost.rows; ++k) {
    for (std::size_t n = 0; n < result[k]; ++n) {
      if (taken[n]) continue;
      const double reduced = cost(k, n) - best.row_potential[k] - best.col_potential[n];
      if (reduced > 1e-9 * std::max(1.0, std::abs(cost(k, n)))) continue;

      std::vector<std::size_t> rest_rows, rest_cols;
      for (std::size_t i = k + 1; i < cost.rows; ++i) rest_rows.push_back(i);
      for (std::size_t j = 0; j < cost.cols; ++j) {
        if (!taken[j] && j != n) rest_cols.push_back(j);
      }
      const Solution rest = solve(cost, rest_rows, rest_cols);
      double total = prefix + cost(k, n);
      for (std::size_t i = 0; i < rest_rows.size(); ++i) total += cost(rest_rows[i], rest.assignment[i]);
      if (close_enough(total, optimum)) {
        result[k] = n;
        for (std::size_t i = 0; i < rest_rows.size(); ++i) result[rest_rows[i]] = rest.assignment[i];
        break;
      }
    }
    taken[result[k]] = 1;
    prefix += cost(k, result[k]);
  }
  return result;
}

void check_inputs(std::span<const ElementTarget> targets, std::span<const ElementPrediction> preds) {
  auto check_distribution = [](std::span<const double> p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(what + " has a negative or non-finite entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw DomainError(what + " does not sum to 1");
  };
  std::size_t length = 0;
  std::size_t vocab = 0;
  bool first = true;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const auto& p = preds[n];
    const std::string where = "prediction " + std::to_string(n);
    check_distribution(p.class_probs, where + " class_probs");
    if (first) {
      length = p.token_probs.size();
      vocab = length ? p.token_probs.front().size() : 0;
      first = false;
    }
    if (p.token_probs.size() != length) throw DomainError(where + " has a different sequence length");
    for (const auto& dist : p.token_probs) {
      if (dist.size() != vocab) throw DomainError(where + " has a different vocabulary size");
      check_distribution(dist, where + " token distribution");
    }
  }
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    const std::string where = "target " + std::to_string(k);
    if (t.tokens.size() != t.mask.size()) throw DomainError(where + " tokens and mask differ in length");
    if (!preds.empty() && t.tokens.size() != length) throw DomainError(where + " length differs from predictions");
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
      if (t.mask[i] != 0 && t.mask[i] != 1) throw DomainError(where + " mask is not binary");
      if (t.mask[i] && (t.tokens[i] < 0 || static_cast<std::size_t>(t.tokens[i]) >= vocab)) {
        throw DomainError(where + " token outside the vocabulary");
      }
    }
  }
}

Matrix matching_cost(std::span<const ElementTarget> targets, std::span<const ElementPrediction> preds,
                     const LossConfig& cfg) {
  Matrix cost(targets.size(), preds.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto cls = static_cast<std::size_t>(targets[k].category);
    for (std::size_t n = 0; n < preds.size(); ++n) {
      const double overlap = iou(preds[n].box, targets[k].box);
      cost(k, n) = -safe_log(preds[n].class_probs[cls]) + (cfg.literal_eq6 ? overlap : 1.0 - overlap);
    }
  }
  return cost;
}

namespace {

void check_assignment(std::size_t targets, std::size_t preds, const Assignment& assignment) {
  if (assignment.size() != targets) throw DomainError("assignment size differs from target count");
  std::vector<char> seen(preds, 0);
  for (std::size_t n : assignment) {
    if (n >= preds || seen[n]) throw DomainError("assignment is not injective into predictions");
    seen[n] = 1;
  }
}

// Masked cross-entropy over token positions [begin, end) of matched pairs.
double token_cross_entropy(std::span<const ElementTarget> targets, std::span<const ElementPrediction> preds,
                           const Assignment& assignment, std::size_t begin, std::size_t end) {
  double loss = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    const auto& p = preds[assignment[k]];
    const std::size_t stop = std::min({end, t.tokens.size(), p.token_probs.size()});
    for (std::size_t i = begin; i < stop; ++i) {
      if (!t.mask[i]) continue;
      loss -= safe_log(p.token_probs[i][static_cast<std::size_t>(t.tokens[i])]);
    }
  }
  return loss;
}

}  // namespace

double element_discrimination_loss(std::span<const ElementTarget> targets,
                                   std::span<const ElementPrediction> preds, const Assignment& assignment,
                                   const LossConfig& cfg) {
  check_assignment(targets.size(), preds.size(), assignment);
  double loss = 0.0;
  std::vector<char> matched(preds.size(), 0);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& p = preds[assignment[k]];
    matched[assignment[k]] = 1;
    const double overlap = iou(p.box, targets[k].box);
    loss += -safe_log(p.class_probs[static_cast<std::size_t>(targets[k].category)]) +
            (cfg.literal_eq6 ? overlap : 1.0 - overlap);
  }
  for (std::size_t n = 0; n < preds.size(); ++n) {
    if (!matched[n]) loss -= safe_log(preds[n].class_probs[kNoObject]);
  }
  return loss + token_cross_entropy(targets, preds, assignment, 0, kHeaderTokens);
}

double element_transcription_loss(std::span<const ElementTarget> targets,
                                  std::span<const ElementPrediction> preds, const Assignment& assignment) {
  check_assignment(targets.size(), preds.size(), assignment);
  return token_cross_entropy(targets, preds, assignment, kHeaderTokens, std::numeric_limits<std::size_t>::max());
}

double sequence_reconstruction_loss(const std::vector<std::vector<int>>& predicted,
                                    const std::vector<std::vector<int>>& targets,
                                    const std::vector<std::vector<int>>& mask) {
  if (predicted.size() != targets.size() || mask.size() != targets.size()) {
    throw DomainError("sequence_reconstruction_loss: shape mismatch");
  }
  double dot = 0.0, pred_norm = 0.0, target_norm = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (predicted[k].size() != targets[k].size() || mask[k].size() != targets[k].size()) {
      throw DomainError("sequence_reconstruction_loss: shape mismatch");
    }
    for (std::size_t i = 0; i < targets[k].size(); ++i) {
      const double a = static_cast<double>(predicted[k][i]) * mask[k][i];
      const double b = static_cast<double>(targets[k][i]) * mask[k][i];
      dot += a * b;
      pred_norm += a * a;
      target_norm += b * b;
    }
  }
  if (pred_norm == 0.0 && target_norm == 0.0) return 0.0;
  if (pred_norm == 0.0 || target_norm == 0.0) return 1.0;
  const double cosine = dot / (std::sqrt(pred_norm) * std::sqrt(target_norm));
  return 1.0 - std::clamp(cosine, -1.0, 1.0);
}

double total_loss(double discrimination, double transcription, double reconstruction, const LossWeights& w) {
  if (w.discrimination < 0.0 || w.transcription < 0.0 || w.reconstruction < 0.0) {
    throw DomainError("loss weights must be non-negative");
  }
  return w.discrimination * discrimination + w.transcription * transcription + w.reconstruction * reconstruction;
}

LossBreakdown document_reconstruction_loss(std::span<const ElementTarget> targets,
                                           std::span<const ElementPrediction> preds, const LossConfig& cfg) {
  check_inputs(targets, preds);
  LossBreakdown out;
  out.assignment = hungarian_assign(matching_cost(targets, preds, cfg));
  out.discrimination = element_discrimination_loss(targets, preds, out.assignment, cfg);
  out.transcription = element_transcription_loss(targets, preds, out.assignment);

  std::vector<std::vector<int>> predicted, expected, mask;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& p = preds[out.assignment[k]];
    std::vector<int> argmax;
    for (const auto& dist : p.token_probs) {
      argmax.push_back(static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin()));
    }
    predicted.push_back(std::move(argmax));
    expected.push_back(targets[k].tokens);
    mask.push_back(targets[k].mask);
  }
  out.reconstruction = sequence_reconstruction_loss(predicted, expected, mask);
  out.total = total_loss(out.discrimination, out.transcription, out.reconstruction, cfg.weights);
  return out;
}

}  // namespace docrec
