#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "docrec/model.hpp"

namespace docrec {

/// Class slots of a prediction: the four categories in enum order, then
/// "no object" for predictions left unmatched.
inline constexpr std::size_t kNoObject = 4;
inline constexpr std::size_t kNumClasses = 5;

/// Number of leading tokens (category + four coordinates) scored by the
/// element discrimination loss; the remainder belongs to the transcription.
inline constexpr std::size_t kHeaderTokens = 5;

/// Clamp applied to probabilities before taking logs.
inline constexpr double kLogEpsilon = 1e-9;

/// Inference-time keep threshold for decoded elements and the default
/// number of element queries. Documented here; not used by the losses.
inline constexpr double kConfidenceThreshold = 0.8;
inline constexpr std::size_t kDefaultQueries = 200;

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct ElementPrediction {
  std::array<double, kNumClasses> class_probs{};
  BoundingBox box;
  /// L distributions over the token vocabulary, teacher-forced.
  std::vector<std::vector<double>> token_probs;
};

struct ElementTarget {
  Category category = Category::Paragraph;
  BoundingBox box;
  std::vector<int> tokens;  // padded to L
  std::vector<int> mask;    // 1 on real tokens, 0 on padding
};

struct LossWeights {
  double discrimination = 1.0;
  double transcription = 1.0;
  double reconstruction = 1.0;
};

struct LossConfig {
  LossWeights weights;
  /// Score box overlap as +IoU (the form printed alongside the loss
  /// definition) instead of 1 - IoU.
  bool literal_eq6 = false;
};

/// Target k -> prediction assignment[k].
using Assignment = std::vector<std::size_t>;

/// Minimum-cost injective assignment of rows to columns (rows <= cols).
/// Among optimal assignments (within 1e-9 relative) the lexicographically
/// smallest is returned. Throws DomainError when rows > cols or on
/// non-finite entries.
Assignment hungarian_assign(const Matrix& cost);

double assignment_cost(const Matrix& cost, const Assignment& assignment);

/// cost(k, n) = -log P_n(class_k) + (1 - IoU(box_n, box_k)).
Matrix matching_cost(std::span<const ElementTarget> targets, std::span<const ElementPrediction> preds,
                     const LossConfig& cfg = {});

/// Matched class and box terms, -log P(no object) for every unmatched
/// prediction, and masked cross-entropy over the first kHeaderTokens target
/// tokens of each matched pair.
double element_discrimination_loss(std::span<const ElementTarget> targets,
                                   std::span<const ElementPrediction> preds, const Assignment& assignment,
                                   const LossConfig& cfg = {});

/// Masked cross-entropy over target tokens kHeaderTokens..L-1 of matched pairs.
double element_transcription_loss(std::span<const ElementTarget> targets,
                                  std::span<const ElementPrediction> preds, const Assignment& assignment);

/// 1 - cos(flat(pred * mask), flat(target * mask)), token ids taken as plain
/// integers. Two zero vectors give 0; one zero vector gives 1.
double sequence_reconstruction_loss(const std::vector<std::vector<int>>& predicted,
                                    const std::vector<std::vector<int>>& targets,
                                    const std::vector<std::vector<int>>& mask);

double total_loss(double discrimination, double transcription, double reconstruction,
                  const LossWeights& w = {});

struct LossBreakdown {
  Assignment assignment;
  double discrimination = 0.0;
  double transcription = 0.0;
  double reconstruction = 0.0;
  double total = 0.0;
};

/// Matching, all three terms (reconstruction over the argmax tokens of the
/// matched predictions) and their weighted sum.
LossBreakdown document_reconstruction_loss(std::span<const ElementTarget> targets,
                                           std::span<const ElementPrediction> preds, const LossConfig& cfg = {});

/// Throws DomainError when a prediction or target breaks its invariants
/// (distributions summing to 1 within 1e-6, masks binary, tokens in range,
/// consistent lengths).
void check_inputs(std::span<const ElementTarget> targets, std::span<const ElementPrediction> preds);

}  // namespace docrec
