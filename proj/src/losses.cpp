#include "himo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "himo/kernels.hpp"

namespace himo {

const char* to_string(LossVariant variant) {
  switch (variant) {
    case LossVariant::kGlobalOnly: return "global_only";
    case LossVariant::kCompOnly: return "comp_only";
    case LossVariant::kGlobalPlusComp: return "global_plus_comp";
    case LossVariant::kGlobalPlusCompUv: return "global_plus_comp_uv";
  }
  return "unknown";
}

LossVariant loss_variant_from_string(const std::string& name) {
  if (name == "global_only") return LossVariant::kGlobalOnly;
  if (name == "comp_only") return LossVariant::kCompOnly;
  if (name == "global_plus_comp") return LossVariant::kGlobalPlusComp;
  if (name == "global_plus_comp_uv") return LossVariant::kGlobalPlusCompUv;
  throw std::invalid_argument("unknown loss variant: " + name);
}

namespace losses {

namespace {

void check_pair_shapes(const Matrix& v, const Matrix& u) {
  if (v.rows() != u.rows() || v.cols() != u.cols()) {
    throw std::invalid_argument("loss inputs: shape mismatch");
  }
  if (v.rows() == 0) throw std::invalid_argument("loss inputs: empty batch");
}

// Row norms, rejecting zero-norm rows with the offending index.
std::vector<double> row_norms(const Matrix& m, const char* name) {
  std::vector<double> norms(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    norms[i] = std::sqrt(kernels::squared_norm(m.row(i).data(), m.cols()));
    if (norms[i] < 1e-300) {
      throw std::invalid_argument(std::string(name) + ": zero-norm row " +
                                  std::to_string(i));
    }
  }
  return norms;
}

Matrix normalize_rows(const Matrix& m, const std::vector<double>& norms) {
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    kernels::scale(1.0 / norms[i], out.row(i).data(), out.cols());
  }
  return out;
}

struct InfonceGrad {
  double loss = 0.0;
  Matrix grad_a;  // w.r.t. unnormalized a
  Matrix grad_b;  // w.r.t. unnormalized b
};

// Symmetric InfoNCE over cosine similarities, with gradients through the
// row normalization. with_grad=false skips the gradient accumulation.
InfonceGrad infonce_cosine(const Matrix& a, const Matrix& b, double temperature,
                           bool with_grad) {
  check_pair_shapes(a, b);
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();

  const auto norms_a = row_norms(a, "infonce lhs");
  const auto norms_b = row_norms(b, "infonce rhs");
  const Matrix ah = normalize_rows(a, norms_a);
  const Matrix bh = normalize_rows(b, norms_b);
  const Matrix s = matmul_transposed(ah, bh);  // s(i,j) = cos(a_i, b_j)

  // Row and column softmax of s / T, evaluated stably.
  Matrix prow(n, n), pcol(n, n);
  InfonceGrad out;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -1e300;
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, s(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += std::exp((s(i, j) - mx) / temperature);
    for (std::size_t j = 0; j < n; ++j) {
      prow(i, j) = std::exp((s(i, j) - mx) / temperature) / denom;
    }
    loss -= std::log(prow(i, i));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double mx = -1e300;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, s(i, j));
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) denom += std::exp((s(i, j) - mx) / temperature);
    for (std::size_t i = 0; i < n; ++i) {
      pcol(i, j) = std::exp((s(i, j) - mx) / temperature) / denom;
    }
    loss -= std::log(pcol(j, j));
  }
  out.loss = loss / (2.0 * static_cast<double>(n));
  if (!with_grad) return out;

  // dL/dS, then through the cosine back to the raw rows.
  const double scale = 1.0 / (2.0 * static_cast<double>(n) * temperature);
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double delta = (i == j) ? 1.0 : 0.0;
      g(i, j) = scale * ((prow(i, j) - delta) + (pcol(i, j) - delta));
    }
  }

  out.grad_a = Matrix(n, d);
  out.grad_b = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double diag_a = 0.0;  // sum_j g(i,j) * s(i,j), the component along ah_i
    for (std::size_t j = 0; j < n; ++j) {
      kernels::axpy(g(i, j), bh.row(j).data(), out.grad_a.row(i).data(), d);
      diag_a += g(i, j) * s(i, j);
    }
    kernels::axpy(-diag_a, ah.row(i).data(), out.grad_a.row(i).data(), d);
    kernels::scale(1.0 / norms_a[i], out.grad_a.row(i).data(), d);
  }
  for (std::size_t j = 0; j < n; ++j) {
    double diag_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      kernels::axpy(g(i, j), ah.row(i).data(), out.grad_b.row(j).data(), d);
      diag_b += g(i, j) * s(i, j);
    }
    kernels::axpy(-diag_b, bh.row(j).data(), out.grad_b.row(j).data(), d);
    kernels::scale(1.0 / norms_b[j], out.grad_b.row(j).data(), d);
  }
  return out;
}

// Pulls a gradient w.r.t. reconstructed rows back through the fixed linear
// map P^T P (the Jacobian of reconstruct with mean and basis frozen).
void accumulate_through_projection(const PcaModel& pca, const Matrix& grad_rec,
                                   double weight, Matrix& grad_raw) {
  if (pca.rank_m == 0) return;
  const std::size_t d = grad_rec.cols();
  std::vector<double> coeffs(pca.rank_m);
  for (std::size_t i = 0; i < grad_rec.rows(); ++i) {
    for (std::size_t k = 0; k < pca.rank_m; ++k) {
      coeffs[k] = kernels::dot(pca.basis.row(k).data(), grad_rec.row(i).data(), d);
    }
    for (std::size_t k = 0; k < pca.rank_m; ++k) {
      kernels::axpy(weight * coeffs[k], pca.basis.row(k).data(),
                    grad_raw.row(i).data(), d);
    }
  }
}

MoloOutput molo_impl(const Matrix& v, const Matrix& u, const PcaModel& pca,
                     double lambda, double temperature, bool with_grad) {
  check_pair_shapes(v, u);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  MoloOutput out;
  out.lambda = lambda;

  const auto global = infonce_cosine(v, u, temperature, with_grad);
  out.loss_global = global.loss;

  const Matrix u_rec = hide::reconstruct_batch(pca, u);
  const auto comp = infonce_cosine(v, u_rec, temperature, with_grad);
  out.loss_comp = comp.loss;
  out.loss_total = out.loss_global + lambda * out.loss_comp;

  if (with_grad) {
    out.grad_v = global.grad_a;
    out.grad_u = global.grad_b;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.grad_v.data()[i] += lambda * comp.grad_a.data()[i];
    }
    accumulate_through_projection(pca, comp.grad_b, lambda, out.grad_u);
  }
  return out;
}

}  // namespace

SimilarityMatrix cosine_similarity_matrix(const Matrix& v, const Matrix& u,
                                          double temperature) {
  check_pair_shapes(v, u);
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const auto norms_v = row_norms(v, "cosine lhs");
  const auto norms_u = row_norms(u, "cosine rhs");
  SimilarityMatrix sim;
  sim.temperature = temperature;
  sim.scores = matmul_transposed(normalize_rows(v, norms_v), normalize_rows(u, norms_u));
  return sim;
}

double infonce_symmetric(const SimilarityMatrix& sim) {
  if (sim.scores.rows() != sim.scores.cols()) {
    throw std::invalid_argument("infonce_symmetric: similarity matrix must be square");
  }
  if (!(sim.temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const std::size_t n = sim.scores.rows();
  const double t = sim.temperature;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mx_row = -1e300, mx_col = -1e300;
    for (std::size_t j = 0; j < n; ++j) {
      mx_row = std::max(mx_row, sim.scores(i, j));
      mx_col = std::max(mx_col, sim.scores(j, i));
    }
    double denom_row = 0.0, denom_col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      denom_row += std::exp((sim.scores(i, j) - mx_row) / t);
      denom_col += std::exp((sim.scores(j, i) - mx_col) / t);
    }
    loss += std::log(denom_row) - (sim.scores(i, i) - mx_row) / t;
    loss += std::log(denom_col) - (sim.scores(i, i) - mx_col) / t;
  }
  return loss / (2.0 * static_cast<double>(n));
}

MoloOutput molo_forward(const Matrix& v, const Matrix& u, const PcaModel& pca,
                        double lambda, double temperature) {
  return molo_impl(v, u, pca, lambda, temperature, /*with_grad=*/false);
}

MoloOutput molo_backward(const Matrix& v, const Matrix& u, const PcaModel& pca,
                         double lambda, double temperature) {
  return molo_impl(v, u, pca, lambda, temperature, /*with_grad=*/true);
}

MoloOutput comp_loss_variant_uv(const Matrix& v, const Matrix& u, double tau,
                                double lambda, double temperature) {
  check_pair_shapes(v, u);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  const PcaModel pca_v = hide::fit(v, tau);
  const PcaModel pca_u = hide::fit(u, tau);

  MoloOutput out;
  out.lambda = lambda;

  const auto global = infonce_cosine(v, u, temperature, /*with_grad=*/true);
  out.loss_global = global.loss;
  out.grad_v = global.grad_a;
  out.grad_u = global.grad_b;

  const Matrix v_rec = hide::reconstruct_batch(pca_v, v);
  const Matrix u_rec = hide::reconstruct_batch(pca_u, u);
  const auto comp = infonce_cosine(v_rec, u_rec, temperature, /*with_grad=*/true);
  out.loss_comp = comp.loss;
  out.loss_total = out.loss_global + lambda * out.loss_comp;

  accumulate_through_projection(pca_v, comp.grad_a, lambda, out.grad_v);
  accumulate_through_projection(pca_u, comp.grad_b, lambda, out.grad_u);
  return out;
}

MoloOutput variant_backward(LossVariant variant, const Matrix& v, const Matrix& u,
                            double tau, double lambda, double temperature,
                            std::size_t* rank_out) {
  check_pair_shapes(v, u);
  if (rank_out) *rank_out = 0;
  switch (variant) {
    case LossVariant::kGlobalOnly: {
      const auto global = infonce_cosine(v, u, temperature, /*with_grad=*/true);
      MoloOutput out;
      out.lambda = lambda;
      out.loss_global = global.loss;
      out.loss_comp = 0.0;
      out.loss_total = global.loss;
      out.grad_v = global.grad_a;
      out.grad_u = global.grad_b;
      return out;
    }
    case LossVariant::kCompOnly: {
      const PcaModel pca = hide::fit(u, tau);
      if (rank_out) *rank_out = pca.rank_m;
      const Matrix u_rec = hide::reconstruct_batch(pca, u);
      const auto comp = infonce_cosine(v, u_rec, temperature, /*with_grad=*/true);
      MoloOutput out;
      out.lambda = lambda;
      out.loss_global = 0.0;
      out.loss_comp = comp.loss;
      out.loss_total = lambda * comp.loss;
      out.grad_v = comp.grad_a;
      kernels::scale(lambda, out.grad_v.data(), out.grad_v.size());
      out.grad_u = Matrix(u.rows(), u.cols());
      accumulate_through_projection(pca, comp.grad_b, lambda, out.grad_u);
      return out;
    }
    case LossVariant::kGlobalPlusComp: {
      const PcaModel pca = hide::fit(u, tau);
      if (rank_out) *rank_out = pca.rank_m;
      return molo_backward(v, u, pca, lambda, temperature);
    }
    case LossVariant::kGlobalPlusCompUv: {
      if (rank_out) *rank_out = hide::fit(u, tau).rank_m;
      return comp_loss_variant_uv(v, u, tau, lambda, temperature);
    }
  }
  throw std::logic_error("variant_backward: unreachable");
}

}  // namespace losses

}  // namespace himo
