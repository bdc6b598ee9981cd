#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "himo/encoders.hpp"
#include "himo/losses.hpp"
#include "himo/metrics.hpp"
#include "himo/synth.hpp"

namespace himo {

/// Toy-scale training configuration. Paper-scale values (batch 1024,
/// 10 epochs over 1.2M pairs, lr 1e-6 for fine-tuning a pretrained model)
/// do not apply to random-init toy encoders; the defaults here are sized
/// so the full ablation grid runs in minutes.
struct TrainConfig {
  double tau = 0.9;
  double lambda = 1.0;
  double temperature = 0.03;
  double learning_rate = 1e-2;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 60;
  std::size_t batch_size = 128;
  std::size_t warmup_steps = 50;
  std::uint64_t seed = 0;
  LossVariant loss_variant = LossVariant::kGlobalPlusComp;
  std::size_t embed_dim = 16;   // shared embedding dimension d
  std::size_t hidden_dim = 0;   // 0 = linear encoders

  void validate() const;
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  /// Applies the fields present in a JSON object on top of *this.
  void apply_json_overrides(const std::string& text);
};

struct StepRecord {
  std::size_t step = 0;
  double loss_total = 0.0;
  double loss_global = 0.0;
  double loss_comp = 0.0;
  std::size_t rank_m = 0;
};

struct TrainTrace {
  std::vector<StepRecord> steps;
  EncoderParams image_encoder;
  EncoderParams text_encoder;
  std::size_t degenerate_batches = 0;

  std::string to_jsonl() const;  // one JSON record per step
};

/// AdamW with decoupled weight decay, bias correction, and linear
/// learning-rate warmup. One instance per parameter tensor.
class AdamW {
 public:
  AdamW() = default;
  explicit AdamW(std::size_t parameter_count);

  /// In-place update; `step` is the 1-based global step (drives both the
  /// bias correction and the warmup ramp). Throws on NaN gradients,
  /// naming the step.
  void update(std::span<double> params, std::span<const double> grads,
              const TrainConfig& config, std::size_t step);

 private:
  std::vector<double> m_;
  std::vector<double> v_;
};

namespace trainer {

/// Deterministic mini-batch loop: encode both modalities, fit the
/// decomposition per batch (variant-dependent), backprop, AdamW step.
/// Bit-identical traces for identical (config, data).
TrainTrace run_training(const TrainConfig& config, const SyntheticBatch& data);

/// Held-out hierarchical-monotonicity evaluation: for each sample, scores
/// the image embedding against encoders applied to the cumulative layer
/// sums (most dominant layer first); reports per-sample Pearson and the
/// dataset mean.
HiMoReport evaluate_himo(const EncoderParams& image_encoder,
                         const EncoderParams& text_encoder,
                         const SyntheticBatch& heldout);

/// Standard retrieval over the encoded held-out pool (text-to-image),
/// identity ground truth.
HiMoReport evaluate_retrieval(const EncoderParams& image_encoder,
                              const EncoderParams& text_encoder,
                              const SyntheticBatch& heldout,
                              const std::vector<std::size_t>& recall_ks);

}  // namespace trainer

}  // namespace himo
