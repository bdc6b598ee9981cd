#pragma once

#include "himo/matrix.hpp"
#include "himo/pca.hpp"

namespace himo {

struct SimilarityMatrix {
  Matrix scores;       // N x N, scores(i, j) = cos(v_i, u_j)
  double temperature;  // > 0
};

struct MoloOutput {
  double loss_global = 0.0;
  double loss_comp = 0.0;
  double loss_total = 0.0;
  double lambda = 0.0;
  Matrix grad_v;  // d loss_total / d v
  Matrix grad_u;  // d loss_total / d u
};

enum class LossVariant {
  kGlobalOnly,        // InfoNCE on (v, u); no decomposition
  kCompOnly,          // component branch alone, decomposition on text
  kGlobalPlusComp,    // global + lambda * component (text decomposition)
  kGlobalPlusCompUv,  // global + lambda * component with decomposition on
                      // both modalities
};

const char* to_string(LossVariant variant);
LossVariant loss_variant_from_string(const std::string& name);

namespace losses {

/// Entry (i, j) = <v_i, u_j> / (|v_i| |u_j|). Rejects zero-norm rows,
/// naming the offending row index.
SimilarityMatrix cosine_similarity_matrix(const Matrix& v, const Matrix& u,
                                          double temperature);

/// Bidirectional InfoNCE: (1/2N) sum_i of the row- and column-softmax
/// cross-entropies of scores/T with positives on the diagonal.
double infonce_symmetric(const SimilarityMatrix& sim);

/// Global branch plus lambda-weighted component branch, where the
/// component branch aligns v with the decomposition-reconstructed text
/// embeddings. Losses only; gradient fields are empty.
MoloOutput molo_forward(const Matrix& v, const Matrix& u, const PcaModel& pca,
                        double lambda, double temperature);

/// Same losses plus analytic gradients w.r.t. v and u. The PCA mean and
/// basis are treated as constants: the component branch reaches u only
/// through the fixed linear map P^T P.
MoloOutput molo_backward(const Matrix& v, const Matrix& u, const PcaModel& pca,
                         double lambda, double temperature);

/// Ablation variant with decomposition on both modalities: the component
/// branch aligns reconstruct(pca_v, v_i) with reconstruct(pca_u, u_i),
/// where pca_v is fitted on v and pca_u on u (both at threshold tau).
MoloOutput comp_loss_variant_uv(const Matrix& v, const Matrix& u, double tau,
                                double lambda, double temperature);

/// Variant-dispatched forward+backward used by the trainer. For variants
/// that need a text decomposition it is fitted internally at `tau`;
/// `rank_out`, when non-null, receives the fitted text rank (0 when no
/// decomposition is involved).
MoloOutput variant_backward(LossVariant variant, const Matrix& v, const Matrix& u,
                            double tau, double lambda, double temperature,
                            std::size_t* rank_out = nullptr);

}  // namespace losses

}  // namespace himo
