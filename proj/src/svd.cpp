#include "himo/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "himo/kernels.hpp"

namespace himo {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffTol = 1.0e-15;

// One-sided Jacobi on w (m x n, m >= n): orthogonalizes the columns of w
// while accumulating the rotations in v (n x n). On exit the columns of w
// are u_j * sigma_j and w_original = w_out * v^T.
void jacobi_orthogonalize(Matrix& w, Matrix& v) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          alpha += wp * wp;
          beta += wq * wq;
          gamma += wp * wq;
        }
        const double limit = kOffTol * std::sqrt(alpha * beta);
        if (std::abs(gamma) <= limit || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
  throw SvdError("thin_svd: Jacobi sweeps did not converge");
}

// Replaces numerically-zero columns of u with vectors orthonormal to the
// rest, drawn from the standard basis via Gram-Schmidt.
void complete_basis(Matrix& u, const std::vector<bool>& is_zero) {
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  for (std::size_t j = 0; j < n; ++j) {
    if (!is_zero[j]) continue;
    const auto project_out = [&](std::vector<double>& cand) {
      for (std::size_t c = 0; c < n; ++c) {
        if (c != j && (!is_zero[c] || c < j)) {
          double proj = 0.0;
          for (std::size_t i = 0; i < m; ++i) proj += cand[i] * u(i, c);
          for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u(i, c);
        }
      }
    };
    // Pick the standard-basis vector with the largest residual outside the
    // filled columns; its norm can be small (down to sqrt(1/m)) when many
    // columns are already placed, so take the best rather than thresholding.
    std::vector<double> best;
    double best_norm = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<double> cand(m, 0.0);
      cand[k] = 1.0;
      project_out(cand);
      const double norm = std::sqrt(kernels::squared_norm(cand.data(), m));
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(cand);
      }
    }
    if (best_norm <= 1e-12) throw SvdError("thin_svd: basis completion failed");
    // Second Gram-Schmidt pass for stability before normalizing.
    project_out(best);
    const double norm = std::sqrt(kernels::squared_norm(best.data(), m));
    if (norm <= 1e-12) throw SvdError("thin_svd: basis completion failed");
    for (std::size_t i = 0; i < m; ++i) u(i, j) = best[i] / norm;
  }
}

// Core: m >= n guaranteed by the caller.
void svd_tall(const Matrix& a, Matrix& u, std::vector<double>& s, Matrix& v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;
  v = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  jacobi_orthogonalize(w, v);

  s.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += w(i, j) * w(i, j);
    s[j] = std::sqrt(acc);
  }

  // Sort non-increasing, permuting the columns of w and v along.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });
  Matrix w_sorted(m, n), v_sorted(n, n);
  std::vector<double> s_sorted(n);
  for (std::size_t j = 0; j < n; ++j) {
    s_sorted[j] = s[order[j]];
    for (std::size_t i = 0; i < m; ++i) w_sorted(i, j) = w(i, order[j]);
    for (std::size_t i = 0; i < n; ++i) v_sorted(i, j) = v(i, order[j]);
  }
  s = std::move(s_sorted);
  v = std::move(v_sorted);

  const double smax = s.empty() ? 0.0 : s[0];
  const double zero_tol =
      smax * static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
  u = Matrix(m, n);
  std::vector<bool> is_zero(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (s[j] <= zero_tol) {
      is_zero[j] = true;
      s[j] = 0.0;
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) u(i, j) = w_sorted(i, j) / s[j];
  }
  complete_basis(u, is_zero);
}

// Force the largest-magnitude entry of each row of vt positive; flip the
// matching column of u so the product is unchanged.
void canonicalize_signs(Matrix& u, Matrix& vt) {
  for (std::size_t i = 0; i < vt.rows(); ++i) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t j = 0; j < vt.cols(); ++j) {
      if (std::abs(vt(i, j)) > best) {
        best = std::abs(vt(i, j));
        arg = j;
      }
    }
    if (vt(i, arg) < 0.0) {
      for (std::size_t j = 0; j < vt.cols(); ++j) vt(i, j) = -vt(i, j);
      for (std::size_t r = 0; r < u.rows(); ++r) u(r, i) = -u(r, i);
    }
  }
}

}  // namespace

SvdResult thin_svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("thin_svd: empty matrix");
  }
  a.require_finite("thin_svd input");

  SvdResult out;
  if (a.rows() >= a.cols()) {
    Matrix u, v;
    svd_tall(a, u, out.singular_values, v);
    out.u = std::move(u);
    out.vt = transpose(v);
  } else {
    // a = (a^T)^T: run on the tall transpose, then swap the factors.
    Matrix u, v;
    svd_tall(transpose(a), u, out.singular_values, v);
    out.u = std::move(v);
    out.vt = transpose(u);
  }
  canonicalize_signs(out.u, out.vt);
  return out;
}

}  // namespace himo
