#pragma once

// Test-only oracles, independent of the implementation paths they check:
// a two-sided Jacobi eigensolver for A^T A, covariance-eigendecomposition
// PCA, naive loss evaluation, textbook statistics, and central-difference
// gradient checking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "himo/matrix.hpp"

namespace himo::oracles {

// Symmetric two-sided Jacobi eigendecomposition: a = q diag(w) q^T with
// eigenvalues sorted non-increasing.
inline void jacobi_eigen_symmetric(const Matrix& a, std::vector<double>& w, Matrix& q) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: square input required");
  Matrix s = a;
  q = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;

  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r) off += s(p, r) * s(p, r);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        if (std::abs(s(p, r)) < 1e-300) continue;
        const double theta = (s(r, r) - s(p, p)) / (2.0 * s(p, r));
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double sip = s(i, p), sir = s(i, r);
          s(i, p) = c * sip - sn * sir;
          s(i, r) = sn * sip + c * sir;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double spi = s(p, i), sri = s(r, i);
          s(p, i) = c * spi - sn * sri;
          s(r, i) = sn * spi + c * sri;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double qip = q(i, p), qir = q(i, r);
          q(i, p) = c * qip - sn * qir;
          q(i, r) = sn * qip + c * qir;
        }
      }
    }
  }

  w.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = s(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w[i] > w[j]; });
  std::vector<double> w_sorted(n);
  Matrix q_sorted(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    w_sorted[j] = w[order[j]];
    for (std::size_t i = 0; i < n; ++i) q_sorted(i, j) = q(i, order[j]);
  }
  w = std::move(w_sorted);
  q = std::move(q_sorted);
}

// Singular values of `a` via the eigenvalues of a^T a.
inline std::vector<double> singular_values_via_gram(const Matrix& a) {
  const Matrix gram = matmul(transpose(a), a);
  std::vector<double> w;
  Matrix q;
  jacobi_eigen_symmetric(gram, w, q);
  std::vector<double> s;
  s.reserve(std::min(a.rows(), a.cols()));
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) {
    s.push_back(std::sqrt(std::max(0.0, w[i])));
  }
  return s;
}

// PCA reconstruction through the sample-covariance eigendecomposition:
// project each centered row onto the top `rank` eigenvectors of C = X^T X
// (centered X) and add the mean back.
inline Matrix pca_reconstruct_via_covariance(const Matrix& batch, std::size_t rank) {
  const std::size_t n = batch.rows();
  const std::size_t d = batch.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += batch(i, j);
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix centered(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centered(i, j) = batch(i, j) - mean[j];

  std::vector<double> w;
  Matrix q;  // columns are eigenvectors
  jacobi_eigen_symmetric(matmul(transpose(centered), centered), w, q);

  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out(i, j) = mean[j];
    for (std::size_t r = 0; r < rank; ++r) {
      double coeff = 0.0;
      for (std::size_t j = 0; j < d; ++j) coeff += centered(i, j) * q(j, r);
      for (std::size_t j = 0; j < d; ++j) out(i, j) += coeff * q(j, r);
    }
  }
  return out;
}

// Rank selection replica: smallest m with cumulative sigma^2 ratio >= tau,
// capped at min(n-1, d). Eigenvalues of the centered Gram matrix are the
// squared singular values.
inline std::size_t pca_rank_via_covariance(const Matrix& batch, double tau) {
  const std::size_t n = batch.rows();
  const std::size_t d = batch.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += batch(i, j);
  for (double& m : mean) m /= static_cast<double>(n);
  Matrix centered(n, d);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      centered(i, j) = batch(i, j) - mean[j];
      total += centered(i, j) * centered(i, j);
    }
  if (total < 1e-12) return 0;
  std::vector<double> w;
  Matrix q;
  jacobi_eigen_symmetric(matmul(transpose(centered), centered), w, q);
  const std::size_t cap = std::min(n - 1, d);
  double running = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    running += std::max(0.0, w[i]);
    if (running / total >= tau) return std::min(i + 1, cap);
  }
  return cap;
}

// Literal two-loop symmetric InfoNCE over precomputed cosine scores.
inline double naive_infonce(const Matrix& scores, double temperature) {
  const std::size_t n = scores.rows();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double denom_row = 0.0, denom_col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      denom_row += std::exp(scores(i, j) / temperature);
      denom_col += std::exp(scores(j, i) / temperature);
    }
    loss -= std::log(std::exp(scores(i, i) / temperature) / denom_row);
    loss -= std::log(std::exp(scores(i, i) / temperature) / denom_col);
  }
  return loss / (2.0 * static_cast<double>(n));
}

// Naive double-loop cosine matrix.
inline Matrix naive_cosine_matrix(const Matrix& v, const Matrix& u) {
  Matrix out(v.rows(), u.rows());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < u.rows(); ++j) {
      double dot = 0.0, nv = 0.0, nu = 0.0;
      for (std::size_t k = 0; k < v.cols(); ++k) {
        dot += v(i, k) * u(j, k);
        nv += v(i, k) * v(i, k);
        nu += u(j, k) * u(j, k);
      }
      out(i, j) = dot / (std::sqrt(nv) * std::sqrt(nu));
    }
  }
  return out;
}

// Textbook two-pass Pearson of (1..n) against values.
inline double textbook_pearson_vs_index(const std::vector<double>& values) {
  const std::size_t n = values.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += static_cast<double>(i + 1);
    mean_y += values[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - mean_x;
    const double dy = values[i] - mean_y;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  return cov / (std::sqrt(vx) * std::sqrt(vy));
}

// Full-sort retrieval oracle (stable sort; equal scores keep index order,
// i.e. ties rank the lower index first).
inline double brute_force_recall(const Matrix& scores,
                                 const std::vector<std::size_t>& ground_truth,
                                 std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::vector<std::size_t> order(scores.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores(i, a) > scores(i, b);
    });
    for (std::size_t r = 0; r < k; ++r) {
      if (order[r] == ground_truth[i]) {
        ++hits;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(scores.rows());
}

// Central-difference gradient of a scalar function of a flat parameter
// vector, h = 1e-5.
inline std::vector<double> central_difference(
    std::vector<double> params, const std::function<double(const std::vector<double>&)>& f,
    double h = 1e-5) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double fp = f(params);
    params[i] = saved - h;
    const double fm = f(params);
    params[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Max relative error between analytic and numeric gradients, with an
// absolute floor so near-zero entries compare sanely.
inline double max_relative_error(const std::vector<double>& analytic,
                                 const std::vector<double>& numeric,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
  return m;
}

}  // namespace himo::oracles
