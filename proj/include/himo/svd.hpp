#pragma once

#include <stdexcept>
#include <vector>

#include "himo/matrix.hpp"

namespace himo {

/// Thin SVD a = u * diag(s) * vt with r = min(rows, cols).
/// Columns of u and rows of vt are orthonormal; singular values are
/// non-increasing and non-negative. The largest-magnitude entry of each
/// row of vt is forced positive so bases are reproducible across runs.
struct SvdResult {
  Matrix u;                            // rows x r
  std::vector<double> singular_values; // length r, non-increasing
  Matrix vt;                           // r x cols
};

/// One-sided Jacobi SVD. Deterministic; throws SvdError if the sweep
/// cap is hit before convergence (never returns silent garbage).
SvdResult thin_svd(const Matrix& a);

struct SvdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace himo
