#pragma once

#include <span>
#include <string>
#include <vector>

#include "himo/matrix.hpp"

namespace himo {

/// In-batch PCA over text embeddings. Rows of `basis` are the retained
/// principal directions; `rank_m` is the smallest component count whose
/// cumulative explained variance reaches `tau`. A batch with (numerically)
/// zero variance yields rank_m = 0 and reconstruction collapses to the mean.
struct PcaModel {
  std::vector<double> mean;             // batch mean embedding
  Matrix basis;                         // rank_m x d, orthonormal rows
  std::vector<double> singular_values;  // all min(N,d) values of the centered batch
  std::size_t rank_m = 0;
  double tau = 0.0;

  std::size_t dim() const { return mean.size(); }
};

struct VarianceProfile {
  std::vector<double> per_component_variance;  // sigma_i^2
  std::vector<double> cumulative_ratio;        // non-decreasing, ends at 1
};

namespace hide {

// Total-variance floor below which a batch counts as degenerate.
inline constexpr double kDegenerateVariance = 1.0e-12;

/// Fits the decomposition on a batch of text embeddings (N x d).
/// Requires 0 < tau <= 1. rank_m is additionally capped at min(N-1, d).
PcaModel fit(const Matrix& text_embeddings, double tau);

/// Reconstruction u' = P^T (P (u - mean)) + mean. rank_m = 0 returns mean.
std::vector<double> reconstruct(const PcaModel& model, std::span<const double> u);

/// Applies `reconstruct` to every row.
Matrix reconstruct_batch(const PcaModel& model, const Matrix& u);

/// sigma_i^2 and cumulative explained-variance ratios; empty for a
/// degenerate model.
VarianceProfile variance_profile(const PcaModel& model);

std::string to_json(const PcaModel& model);
PcaModel from_json(const std::string& text);

}  // namespace hide

}  // namespace himo
