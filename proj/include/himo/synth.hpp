#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "himo/matrix.hpp"
#include "himo/pca.hpp"

namespace himo {

/// Parameters of the layered semantic construction: K layers of strictly
/// decreasing per-coordinate variance, each living in its own coordinate
/// block of R^d (so distinct layers are exactly orthogonal). A second mode
/// replaces the blocks with random, merely decorrelated directions.
struct HierarchySpec {
  std::size_t num_layers = 0;            // K >= 2
  std::vector<double> layer_variances;   // length K, strictly decreasing, > 0
  std::size_t dim = 0;                   // d
  std::vector<std::size_t> layer_dims;   // per-layer block widths, sum <= d
  std::size_t batch_size = 0;            // N
  std::uint64_t seed = 0;
  bool disjoint_blocks = true;           // false: random decorrelated directions
  double image_noise = 0.05;             // stddev of the image perturbation
  double image_attenuation = 0.55;       // geometric damping of lower layers in v

  void validate() const;  // throws std::invalid_argument on violation
};

struct SyntheticBatch {
  Matrix text_embeddings;                // N x d, row i = sum_k layer k row i
  std::vector<Matrix> layer_components;  // K matrices, N x d
  Matrix image_embeddings;               // N x d, unit rows
  // [begin, end) coordinate ranges per layer; meaningful in block mode.
  std::vector<std::pair<std::size_t, std::size_t>> layer_blocks;
};

/// Appendix-style enrichment chain: u^(k) = base + sum_{j<k} r_j with every
/// residual positively aligned with v and residual norms non-decreasing.
struct ResidualChain {
  std::vector<double> v;                       // unit norm
  std::vector<double> base;                    // u^(1)
  std::vector<std::vector<double>> residuals;  // K-1 increments
};

namespace synth {

SyntheticBatch generate_hierarchical_batch(const HierarchySpec& spec);

/// Draws a chain whose cosine sequence is strictly increasing by
/// construction: each step grows the component parallel to v, shrinks the
/// perpendicular remainder, and rescales so norms never decrease.
ResidualChain generate_residual_chain(std::size_t dim, std::size_t num_levels,
                                      std::uint64_t seed);

struct MonotoneCheck {
  bool strictly_increasing = false;
  std::vector<double> scores;  // cos(v, u^(k)) for k = 1..K
};

/// Evaluates cos(v, u^(k)) along the chain; true iff strictly increasing.
MonotoneCheck verify_monotone(const ResidualChain& chain);

/// Mean squared cosine of each retained PCA direction with its projection
/// onto the span of the top `top_layers` coordinate blocks. 1 when the PCA
/// image lies entirely in the high-level span; rank 0 counts as 1
/// (vacuous containment). Block mode only.
double subspace_alignment(const PcaModel& pca, const SyntheticBatch& batch,
                          std::size_t top_layers);

/// Fixture export: layer/text/image matrices in the binary format plus a
/// JSON manifest, under `dir`.
void save_batch(const SyntheticBatch& batch, const HierarchySpec& spec,
                const std::string& dir);
std::pair<SyntheticBatch, HierarchySpec> load_batch(const std::string& dir);

}  // namespace synth

}  // namespace himo
