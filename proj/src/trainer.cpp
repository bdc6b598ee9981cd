#include "himo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "himo/kernels.hpp"
#include "himo/pca.hpp"

namespace himo {

void TrainConfig::validate() const {
  if (!(tau > 0.0) || tau > 1.0) throw std::invalid_argument("config: tau in (0,1]");
  if (lambda < 0.0) throw std::invalid_argument("config: lambda >= 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("config: temperature > 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("config: learning_rate > 0");
  if (weight_decay < 0.0) throw std::invalid_argument("config: weight_decay >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("config: betas in [0,1)");
  }
  if (batch_size < 2) throw std::invalid_argument("config: batch_size >= 2");
  if (epochs == 0) throw std::invalid_argument("config: epochs >= 1");
  if (embed_dim == 0) throw std::invalid_argument("config: embed_dim >= 1");
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["tau"] = tau;
  j["lambda"] = lambda;
  j["temperature"] = temperature;
  j["learning_rate"] = learning_rate;
  j["weight_decay"] = weight_decay;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["epsilon"] = epsilon;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["warmup_steps"] = warmup_steps;
  j["seed"] = seed;
  j["loss_variant"] = to_string(loss_variant);
  j["embed_dim"] = embed_dim;
  j["hidden_dim"] = hidden_dim;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  TrainConfig config;
  config.apply_json_overrides(text);
  return config;
}

void TrainConfig::apply_json_overrides(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.contains("tau")) tau = j["tau"].get<double>();
  if (j.contains("lambda")) lambda = j["lambda"].get<double>();
  if (j.contains("temperature")) temperature = j["temperature"].get<double>();
  if (j.contains("learning_rate")) learning_rate = j["learning_rate"].get<double>();
  if (j.contains("weight_decay")) weight_decay = j["weight_decay"].get<double>();
  if (j.contains("beta1")) beta1 = j["beta1"].get<double>();
  if (j.contains("beta2")) beta2 = j["beta2"].get<double>();
  if (j.contains("epsilon")) epsilon = j["epsilon"].get<double>();
  if (j.contains("epochs")) epochs = j["epochs"].get<std::size_t>();
  if (j.contains("batch_size")) batch_size = j["batch_size"].get<std::size_t>();
  if (j.contains("warmup_steps")) warmup_steps = j["warmup_steps"].get<std::size_t>();
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("loss_variant")) {
    loss_variant = loss_variant_from_string(j["loss_variant"].get<std::string>());
  }
  if (j.contains("embed_dim")) embed_dim = j["embed_dim"].get<std::size_t>();
  if (j.contains("hidden_dim")) hidden_dim = j["hidden_dim"].get<std::size_t>();
  validate();
}

std::string TrainTrace::to_jsonl() const {
  std::ostringstream out;
  for (const auto& record : steps) {
    nlohmann::json j;
    j["step"] = record.step;
    j["loss_total"] = record.loss_total;
    j["loss_global"] = record.loss_global;
    j["loss_comp"] = record.loss_comp;
    j["rank_m"] = record.rank_m;
    out << j.dump() << '\n';
  }
  return out.str();
}

AdamW::AdamW(std::size_t parameter_count)
    : m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamW::update(std::span<double> params, std::span<const double> grads,
                   const TrainConfig& config, std::size_t step) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("AdamW: size mismatch");
  }
  if (step == 0) throw std::invalid_argument("AdamW: step counter is 1-based");
  for (double g : grads) {
    if (std::isnan(g)) {
      throw std::runtime_error("AdamW: NaN gradient at step " + std::to_string(step));
    }
  }

  const double warmup =
      config.warmup_steps == 0
          ? 1.0
          : std::min(1.0, static_cast<double>(step) /
                              static_cast<double>(config.warmup_steps));
  const double lr = config.learning_rate * warmup;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));

  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config.beta1 * m_[i] + (1.0 - config.beta1) * grads[i];
    v_[i] = config.beta2 * v_[i] + (1.0 - config.beta2) * grads[i] * grads[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    params[i] -= lr * config.weight_decay * params[i];
  }
}

namespace trainer {

namespace {

// Flattened tensor list over encoder params, pairing each tensor with its
// own AdamW state but a shared step counter.
struct OptimizerBundle {
  std::vector<AdamW> states;

  explicit OptimizerBundle(const EncoderParams& params) {
    states.emplace_back(params.weight.size());
    states.emplace_back(params.bias.size());
    if (params.has_hidden()) {
      states.emplace_back(params.hidden_weight->size());
      states.emplace_back(params.hidden_bias->size());
    }
  }

  void step(EncoderParams& params, const EncoderGrads& grads,
            const TrainConfig& config, std::size_t global_step) {
    states[0].update({params.weight.data(), params.weight.size()},
                     {grads.weight.data(), grads.weight.size()}, config, global_step);
    states[1].update(params.bias, grads.bias, config, global_step);
    if (params.has_hidden()) {
      states[2].update({params.hidden_weight->data(), params.hidden_weight->size()},
                       {grads.hidden_weight->data(), grads.hidden_weight->size()},
                       config, global_step);
      states[3].update(*params.hidden_bias, *grads.hidden_bias, config, global_step);
    }
  }
};

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& indices,
                   std::size_t begin, std::size_t count) {
  Matrix out(count, src.cols());
  for (std::size_t i = 0; i < count; ++i) {
    const auto row = src.row(indices[begin + i]);
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

TrainTrace run_training(const TrainConfig& config, const SyntheticBatch& data) {
  config.validate();
  const std::size_t n = data.text_embeddings.rows();
  if (n < config.batch_size) {
    throw std::invalid_argument("run_training: dataset smaller than one batch");
  }
  const std::size_t d_in = data.text_embeddings.cols();

  TrainTrace trace;
  trace.image_encoder =
      encoders::init_params(d_in, config.embed_dim, config.seed * 2654435761u + 1,
                            config.hidden_dim);
  trace.text_encoder =
      encoders::init_params(d_in, config.embed_dim, config.seed * 2654435761u + 2,
                            config.hidden_dim);

  OptimizerBundle opt_image(trace.image_encoder);
  OptimizerBundle opt_text(trace.text_encoder);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  const std::size_t batches_per_epoch = n / config.batch_size;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      ++global_step;
      const Matrix x_img =
          gather_rows(data.image_embeddings, order, b * config.batch_size,
                      config.batch_size);
      const Matrix x_txt =
          gather_rows(data.text_embeddings, order, b * config.batch_size,
                      config.batch_size);

      const Matrix v = encoders::encode_batch(trace.image_encoder, x_img);
      const Matrix u = encoders::encode_batch(trace.text_encoder, x_txt);

      std::size_t rank_m = 0;
      const MoloOutput out = losses::variant_backward(
          config.loss_variant, v, u, config.tau, config.lambda,
          config.temperature, &rank_m);
      if (rank_m == 0 && config.loss_variant != LossVariant::kGlobalOnly) {
        ++trace.degenerate_batches;
      }

      const EncoderGrads g_img =
          encoders::encoder_backward(trace.image_encoder, x_img, out.grad_v);
      const EncoderGrads g_txt =
          encoders::encoder_backward(trace.text_encoder, x_txt, out.grad_u);
      opt_image.step(trace.image_encoder, g_img, config, global_step);
      opt_text.step(trace.text_encoder, g_txt, config, global_step);

      trace.steps.push_back({global_step, out.loss_total, out.loss_global,
                             out.loss_comp, rank_m});
    }
  }
  return trace;
}

HiMoReport evaluate_himo(const EncoderParams& image_encoder,
                         const EncoderParams& text_encoder,
                         const SyntheticBatch& heldout) {
  const std::size_t n = heldout.text_embeddings.rows();
  const std::size_t k_layers = heldout.layer_components.size();
  const std::size_t d_in = heldout.text_embeddings.cols();
  if (k_layers < 2) throw std::invalid_argument("evaluate_himo: need >= 2 layers");

  HiMoReport report;
  report.k = k_layers;
  double pearson_sum = 0.0;
  std::size_t pearson_count = 0;

  std::vector<double> subtext(d_in);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = encoders::encode(image_encoder, heldout.image_embeddings.row(i));

    ScoreSequence seq;
    seq.sample_id = "sample_" + std::to_string(i);
    std::fill(subtext.begin(), subtext.end(), 0.0);
    for (std::size_t k = 0; k < k_layers; ++k) {
      kernels::axpy(1.0, heldout.layer_components[k].row(i).data(), subtext.data(), d_in);
      const auto u = encoders::encode(text_encoder, subtext);
      seq.scores.push_back(kernels::dot(v.data(), u.data(), v.size()));
    }

    const PearsonResult p = metrics::himo_pearson(seq);
    if (p.degenerate) {
      ++report.degenerate_count;
    } else {
      pearson_sum += p.value;
      ++pearson_count;
    }
    report.per_sample.push_back(std::move(seq));
    report.per_sample_pearson.push_back(p);
  }
  if (pearson_count > 0) {
    report.himo_k_mean = pearson_sum / static_cast<double>(pearson_count);
  }
  return report;
}

HiMoReport evaluate_retrieval(const EncoderParams& image_encoder,
                              const EncoderParams& text_encoder,
                              const SyntheticBatch& heldout,
                              const std::vector<std::size_t>& recall_ks) {
  const Matrix v = encoders::encode_batch(image_encoder, heldout.image_embeddings);
  const Matrix u = encoders::encode_batch(text_encoder, heldout.text_embeddings);
  const Matrix scores = matmul_transposed(u, v);  // text-to-image

  std::vector<std::size_t> ground_truth(scores.rows());
  std::iota(ground_truth.begin(), ground_truth.end(), 0);

  HiMoReport report;
  report.k = 0;
  for (std::size_t k : recall_ks) {
    report.recall_at[k] = metrics::recall_at_k(scores, ground_truth, k);
  }
  return report;
}

}  // namespace trainer

}  // namespace himo
