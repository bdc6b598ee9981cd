#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "himo/matrix.hpp"

namespace himo {

/// Affine map (optionally with one tanh hidden layer) followed by L2
/// normalization onto the unit sphere. Row-vector convention:
/// z = x W + b, with W of shape d_in x d_out.
struct EncoderParams {
  Matrix weight;             // (d_in or hidden) x d_out
  std::vector<double> bias;  // d_out
  std::optional<Matrix> hidden_weight;             // d_in x hidden
  std::optional<std::vector<double>> hidden_bias;  // hidden

  std::size_t input_dim() const {
    return hidden_weight ? hidden_weight->rows() : weight.rows();
  }
  std::size_t output_dim() const { return weight.cols(); }
  bool has_hidden() const { return hidden_weight.has_value(); }
};

/// Gradients w.r.t. EncoderParams, same shapes.
struct EncoderGrads {
  Matrix weight;
  std::vector<double> bias;
  std::optional<Matrix> hidden_weight;
  std::optional<std::vector<double>> hidden_bias;
};

enum class Modality { kImageLike, kTextLike };

struct FeatureVector {
  std::vector<double> values;
  Modality modality = Modality::kTextLike;
};

namespace encoders {

/// Deterministic random initialization (scaled Gaussian entries).
EncoderParams init_params(std::size_t d_in, std::size_t d_out, std::uint64_t seed,
                          std::size_t hidden = 0);

/// Forward pass for one input; output has unit norm. Rejects inputs whose
/// raw (pre-normalization) output norm falls below 1e-12.
std::vector<double> encode(const EncoderParams& params, std::span<const double> x);

/// Forward pass for a batch of inputs (rows).
Matrix encode_batch(const EncoderParams& params, const Matrix& inputs);

/// Exact parameter gradients for upstream d loss / d output, chained
/// through the normalization Jacobian (I/|z| - z z^T / |z|^3).
EncoderGrads encoder_backward(const EncoderParams& params, const Matrix& inputs,
                              const Matrix& upstream_grad);

/// Hashed signed bag-of-words over lowercase alphanumeric tokens
/// (64-bit FNV-1a, seed XORed into the offset basis). Deterministic;
/// additive over concatenation. Empty text yields the zero vector.
FeatureVector featurize_text(const std::string& text, std::size_t d_in,
                             std::uint64_t seed);

/// Checkpoint I/O: binary matrices plus a JSON manifest under `dir`,
/// prefixed by `name` (e.g. "text_encoder").
void save_params(const EncoderParams& params, const std::string& dir,
                 const std::string& name);
EncoderParams load_params(const std::string& dir, const std::string& name);

}  // namespace encoders

}  // namespace himo
