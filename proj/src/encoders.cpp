#include "himo/encoders.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "himo/kernels.hpp"

namespace himo::encoders {

namespace {

constexpr double kZeroOutputNorm = 1e-12;

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                       double stddev) {
  Matrix m(rows, cols);
  std::normal_distribution<double> dist(0.0, stddev);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// z = x W + b
std::vector<double> affine(const Matrix& w, const std::vector<double>& b,
                           std::span<const double> x) {
  if (x.size() != w.rows()) {
    throw std::invalid_argument("encode: input dimension mismatch");
  }
  std::vector<double> z = b;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    kernels::axpy(x[i], w.row(i).data(), z.data(), w.cols());
  }
  return z;
}

struct ForwardCache {
  std::vector<double> hidden;      // post-tanh, empty without hidden layer
  std::vector<double> raw;         // pre-normalization output z
  std::vector<double> normalized;  // y = z / |z|
  double norm = 0.0;
};

ForwardCache forward(const EncoderParams& params, std::span<const double> x) {
  ForwardCache cache;
  if (params.has_hidden()) {
    cache.hidden = affine(*params.hidden_weight, *params.hidden_bias, x);
    for (double& h : cache.hidden) h = std::tanh(h);
    cache.raw = affine(params.weight, params.bias, cache.hidden);
  } else {
    cache.raw = affine(params.weight, params.bias, x);
  }
  cache.norm = std::sqrt(kernels::squared_norm(cache.raw.data(), cache.raw.size()));
  if (cache.norm < kZeroOutputNorm) {
    throw std::invalid_argument("encode: pre-normalization output is (near) zero");
  }
  cache.normalized = cache.raw;
  kernels::scale(1.0 / cache.norm, cache.normalized.data(), cache.normalized.size());
  return cache;
}

}  // namespace

EncoderParams init_params(std::size_t d_in, std::size_t d_out, std::uint64_t seed,
                          std::size_t hidden) {
  if (d_in == 0 || d_out == 0) throw std::invalid_argument("init_params: zero dimension");
  std::mt19937_64 rng(seed);
  EncoderParams params;
  if (hidden > 0) {
    params.hidden_weight = gaussian_matrix(d_in, hidden, rng,
                                           1.0 / std::sqrt(static_cast<double>(d_in)));
    params.hidden_bias = std::vector<double>(hidden, 0.0);
    params.weight = gaussian_matrix(hidden, d_out, rng,
                                    1.0 / std::sqrt(static_cast<double>(hidden)));
  } else {
    params.weight = gaussian_matrix(d_in, d_out, rng,
                                    1.0 / std::sqrt(static_cast<double>(d_in)));
  }
  params.bias = std::vector<double>(d_out, 0.0);
  return params;
}

std::vector<double> encode(const EncoderParams& params, std::span<const double> x) {
  return forward(params, x).normalized;
}

Matrix encode_batch(const EncoderParams& params, const Matrix& inputs) {
  Matrix out(inputs.rows(), params.output_dim());
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    const auto y = encode(params, inputs.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

EncoderGrads encoder_backward(const EncoderParams& params, const Matrix& inputs,
                              const Matrix& upstream_grad) {
  if (inputs.rows() != upstream_grad.rows() ||
      upstream_grad.cols() != params.output_dim() ||
      inputs.cols() != params.input_dim()) {
    throw std::invalid_argument("encoder_backward: shape mismatch");
  }

  EncoderGrads grads;
  grads.weight = Matrix(params.weight.rows(), params.weight.cols());
  grads.bias = std::vector<double>(params.bias.size(), 0.0);
  if (params.has_hidden()) {
    grads.hidden_weight = Matrix(params.hidden_weight->rows(), params.hidden_weight->cols());
    grads.hidden_bias = std::vector<double>(params.hidden_bias->size(), 0.0);
  }

  const std::size_t d_out = params.output_dim();
  for (std::size_t n = 0; n < inputs.rows(); ++n) {
    const auto x = inputs.row(n);
    const ForwardCache cache = forward(params, x);

    // Through y = z/|z|: g_z = (g - (g.y) y) / |z|
    std::vector<double> g_z(d_out);
    const double g_dot_y =
        kernels::dot(upstream_grad.row(n).data(), cache.normalized.data(), d_out);
    for (std::size_t j = 0; j < d_out; ++j) {
      g_z[j] = (upstream_grad(n, j) - g_dot_y * cache.normalized[j]) / cache.norm;
    }

    const double* last_input = params.has_hidden() ? cache.hidden.data() : x.data();
    for (std::size_t i = 0; i < params.weight.rows(); ++i) {
      kernels::axpy(last_input[i], g_z.data(), grads.weight.row(i).data(), d_out);
    }
    kernels::axpy(1.0, g_z.data(), grads.bias.data(), d_out);

    if (params.has_hidden()) {
      // g_h = W g_z, then through tanh: g_pre = g_h * (1 - h^2)
      const std::size_t h_dim = cache.hidden.size();
      std::vector<double> g_pre(h_dim);
      for (std::size_t i = 0; i < h_dim; ++i) {
        const double g_h = kernels::dot(params.weight.row(i).data(), g_z.data(), d_out);
        g_pre[i] = g_h * (1.0 - cache.hidden[i] * cache.hidden[i]);
      }
      for (std::size_t i = 0; i < inputs.cols(); ++i) {
        kernels::axpy(x[i], g_pre.data(), grads.hidden_weight->row(i).data(), h_dim);
      }
      kernels::axpy(1.0, g_pre.data(), grads.hidden_bias->data(), h_dim);
    }
  }
  return grads;
}

FeatureVector featurize_text(const std::string& text, std::size_t d_in,
                             std::uint64_t seed) {
  if (d_in == 0) throw std::invalid_argument("featurize_text: d_in must be >= 1");

  constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
  constexpr std::uint64_t kFnvPrime = 1099511628211ull;

  FeatureVector fv;
  fv.modality = Modality::kTextLike;
  fv.values.assign(d_in, 0.0);

  std::uint64_t hash = kFnvOffset ^ seed;
  bool in_token = false;
  auto flush = [&]() {
    if (!in_token) return;
    const std::size_t bucket = hash % d_in;
    const double sign = ((hash >> 32) & 1u) ? 1.0 : -1.0;
    fv.values[bucket] += sign;
    hash = kFnvOffset ^ seed;
    in_token = false;
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      const unsigned char lower = static_cast<unsigned char>(std::tolower(c));
      hash = (hash ^ lower) * kFnvPrime;
      in_token = true;
    } else {
      flush();
    }
  }
  flush();
  return fv;
}

void save_params(const EncoderParams& params, const std::string& dir,
                 const std::string& name) {
  const std::string base = dir + "/" + name;
  save_matrix(params.weight, base + "_weight.bin");
  save_matrix(Matrix(1, params.bias.size(), params.bias), base + "_bias.bin");

  nlohmann::json manifest;
  manifest["name"] = name;
  manifest["input_dim"] = params.input_dim();
  manifest["output_dim"] = params.output_dim();
  manifest["hidden_dim"] =
      params.has_hidden() ? params.hidden_weight->cols() : std::size_t{0};
  if (params.has_hidden()) {
    save_matrix(*params.hidden_weight, base + "_hidden_weight.bin");
    save_matrix(Matrix(1, params.hidden_bias->size(), *params.hidden_bias),
                base + "_hidden_bias.bin");
  }
  std::ofstream out(base + "_manifest.json");
  if (!out) throw std::runtime_error("save_params: cannot open manifest for " + base);
  out << manifest.dump(2) << "\n";
}

EncoderParams load_params(const std::string& dir, const std::string& name) {
  const std::string base = dir + "/" + name;
  std::ifstream in(base + "_manifest.json");
  if (!in) throw std::runtime_error("load_params: missing manifest for " + base);
  nlohmann::json manifest;
  in >> manifest;

  EncoderParams params;
  params.weight = load_matrix(base + "_weight.bin");
  params.bias = load_matrix(base + "_bias.bin").values();
  if (manifest.at("hidden_dim").get<std::size_t>() > 0) {
    params.hidden_weight = load_matrix(base + "_hidden_weight.bin");
    params.hidden_bias = load_matrix(base + "_hidden_bias.bin").values();
  }
  return params;
}

}  // namespace himo::encoders
