#include "himo/synth.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "himo/kernels.hpp"

namespace himo {

void HierarchySpec::validate() const {
  if (num_layers < 2) throw std::invalid_argument("HierarchySpec: need K >= 2");
  if (layer_variances.size() != num_layers || layer_dims.size() != num_layers) {
    throw std::invalid_argument("HierarchySpec: per-layer arrays must have length K");
  }
  for (std::size_t k = 0; k < num_layers; ++k) {
    if (!(layer_variances[k] > 0.0)) {
      throw std::invalid_argument("HierarchySpec: variances must be positive");
    }
    if (k > 0 && !(layer_variances[k] < layer_variances[k - 1])) {
      throw std::invalid_argument("HierarchySpec: variances must be strictly decreasing");
    }
    if (layer_dims[k] == 0) {
      throw std::invalid_argument("HierarchySpec: layer dims must be >= 1");
    }
  }
  const std::size_t total =
      std::accumulate(layer_dims.begin(), layer_dims.end(), std::size_t{0});
  if (total > dim) throw std::invalid_argument("HierarchySpec: layer dims exceed d");
  if (batch_size == 0) throw std::invalid_argument("HierarchySpec: empty batch");
  if (!(image_noise >= 0.0)) throw std::invalid_argument("HierarchySpec: bad image_noise");
}

namespace synth {

namespace {

std::vector<double> random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm < 1e-6) {
    for (double& x : v) x = gauss(rng);
    norm = std::sqrt(kernels::squared_norm(v.data(), dim));
  }
  kernels::scale(1.0 / norm, v.data(), dim);
  return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = std::sqrt(kernels::squared_norm(a.data(), a.size()));
  const double nb = std::sqrt(kernels::squared_norm(b.data(), b.size()));
  return kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
}

}  // namespace

SyntheticBatch generate_hierarchical_batch(const HierarchySpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t n = spec.batch_size;
  const std::size_t d = spec.dim;
  const std::size_t k_layers = spec.num_layers;

  SyntheticBatch batch;
  batch.layer_components.reserve(k_layers);
  batch.layer_blocks.reserve(k_layers);

  // Directions per layer: coordinate blocks, or random decorrelated
  // directions spanning the same widths.
  std::vector<Matrix> directions;  // layer_dims[k] x d, rows to combine
  std::size_t offset = 0;
  for (std::size_t k = 0; k < k_layers; ++k) {
    batch.layer_blocks.emplace_back(offset, offset + spec.layer_dims[k]);
    Matrix dirs(spec.layer_dims[k], d);
    for (std::size_t r = 0; r < spec.layer_dims[k]; ++r) {
      if (spec.disjoint_blocks) {
        dirs(r, offset + r) = 1.0;
      } else {
        const auto v = random_unit_vector(d, rng);
        std::copy(v.begin(), v.end(), dirs.row(r).begin());
      }
    }
    directions.push_back(std::move(dirs));
    offset += spec.layer_dims[k];
  }

  batch.text_embeddings = Matrix(n, d);
  for (std::size_t k = 0; k < k_layers; ++k) {
    Matrix layer(n, d);
    const double sigma = std::sqrt(spec.layer_variances[k]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < spec.layer_dims[k]; ++r) {
        const double coeff = sigma * gauss(rng);
        kernels::axpy(coeff, directions[k].row(r).data(), layer.row(i).data(), d);
      }
      kernels::axpy(1.0, layer.row(i).data(), batch.text_embeddings.row(i).data(), d);
    }
    batch.layer_components.push_back(std::move(layer));
  }

  // Paired image: top-layer component, geometrically attenuated lower
  // layers, isotropic noise; unit-normalized.
  batch.image_embeddings = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = batch.image_embeddings.row(i);
    kernels::axpy(1.0, batch.layer_components[0].row(i).data(), row.data(), d);
    double atten = spec.image_attenuation;
    for (std::size_t k = 1; k < k_layers; ++k) {
      kernels::axpy(atten, batch.layer_components[k].row(i).data(), row.data(), d);
      atten *= spec.image_attenuation;
    }
    for (std::size_t j = 0; j < d; ++j) row[j] += spec.image_noise * gauss(rng);
    const double norm = std::sqrt(kernels::squared_norm(row.data(), d));
    if (norm < 1e-12) throw std::runtime_error("generate_hierarchical_batch: zero image");
    kernels::scale(1.0 / norm, row.data(), d);
  }
  return batch;
}

ResidualChain generate_residual_chain(std::size_t dim, std::size_t num_levels,
                                      std::uint64_t seed) {
  if (num_levels < 2 || dim < 2) {
    throw std::invalid_argument("generate_residual_chain: need K >= 2 and d >= 2");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(1.0, 1.25);

  ResidualChain chain;
  chain.v = random_unit_vector(dim, rng);

  // Base sampled, then reflected so its v-component is positive; a floor
  // on that component keeps the decomposition below well-defined.
  chain.base = random_unit_vector(dim, rng);
  double align = kernels::dot(chain.v.data(), chain.base.data(), dim);
  if (align < 0.0) {
    kernels::axpy(-2.0 * align, chain.v.data(), chain.base.data(), dim);
    align = -align;
  }
  if (align < 0.05) {
    kernels::axpy(0.05 - align, chain.v.data(), chain.base.data(), dim);
  }

  // Write the running sum as u = alpha*v + w with w orthogonal to v.
  // Each residual r = a*v - eps*w + z with a > 0, eps in (0,1) and z
  // orthogonal to both v and w, sized so the perpendicular part of u never
  // grows. The parallel part strictly grows, so cos(v, u) strictly rises.
  std::vector<double> current = chain.base;
  double prev_norm = 0.0;

  for (std::size_t j = 0; j + 1 < num_levels; ++j) {
    const double alpha = kernels::dot(chain.v.data(), current.data(), dim);
    std::vector<double> w = current;
    kernels::axpy(-alpha, chain.v.data(), w.data(), dim);
    const double w_norm = std::sqrt(kernels::squared_norm(w.data(), dim));

    std::uniform_real_distribution<double> eps_dist(0.05, 0.5);
    const double eps = eps_dist(rng);

    // Random direction orthogonal to both v and w.
    std::vector<double> z(dim);
    for (double& x : z) x = gauss(rng);
    const double zv = kernels::dot(z.data(), chain.v.data(), dim);
    kernels::axpy(-zv, chain.v.data(), z.data(), dim);
    if (w_norm > 1e-12) {
      const double zw = kernels::dot(z.data(), w.data(), dim) / (w_norm * w_norm);
      kernels::axpy(-zw, w.data(), z.data(), dim);
    }
    const double z_raw = std::sqrt(kernels::squared_norm(z.data(), dim));
    // |z| <= 0.9 * |w| * sqrt(1 - (1-eps)^2) keeps |(1-eps)w + z| < |w|.
    const double z_cap = 0.9 * w_norm * std::sqrt(1.0 - (1.0 - eps) * (1.0 - eps));
    if (z_raw > 1e-12) {
      kernels::scale(z_cap / z_raw, z.data(), dim);
    }

    double a = unif(rng) * std::max(0.1, 0.25 * alpha) *
               (1.0 + static_cast<double>(j));
    // Non-decreasing residual norms: growing a only adds v-mass, which
    // preserves both constraints.
    const double fixed_sq = eps * eps * w_norm * w_norm + z_cap * z_cap;
    if (a * a + fixed_sq < prev_norm * prev_norm) {
      a = std::sqrt(prev_norm * prev_norm * 1.02 - fixed_sq);
    }

    std::vector<double> r(dim, 0.0);
    kernels::axpy(a, chain.v.data(), r.data(), dim);
    kernels::axpy(-eps, w.data(), r.data(), dim);
    kernels::axpy(1.0, z.data(), r.data(), dim);

    prev_norm = std::sqrt(kernels::squared_norm(r.data(), dim));
    kernels::axpy(1.0, r.data(), current.data(), dim);
    chain.residuals.push_back(std::move(r));
  }
  return chain;
}

MonotoneCheck verify_monotone(const ResidualChain& chain) {
  MonotoneCheck check;
  std::vector<double> current = chain.base;
  check.scores.push_back(cosine(chain.v, current));
  for (const auto& r : chain.residuals) {
    kernels::axpy(1.0, r.data(), current.data(), current.size());
    check.scores.push_back(cosine(chain.v, current));
  }
  check.strictly_increasing = true;
  for (std::size_t k = 1; k < check.scores.size(); ++k) {
    if (!(check.scores[k] > check.scores[k - 1])) {
      check.strictly_increasing = false;
      break;
    }
  }
  return check;
}

double subspace_alignment(const PcaModel& pca, const SyntheticBatch& batch,
                          std::size_t top_layers) {
  if (top_layers == 0 || top_layers > batch.layer_blocks.size()) {
    throw std::invalid_argument("subspace_alignment: bad top_layers");
  }
  if (pca.rank_m == 0) return 1.0;

  double acc = 0.0;
  for (std::size_t r = 0; r < pca.rank_m; ++r) {
    const auto row = pca.basis.row(r);
    double inside = 0.0;
    for (std::size_t k = 0; k < top_layers; ++k) {
      const auto [begin, end] = batch.layer_blocks[k];
      for (std::size_t j = begin; j < end; ++j) inside += row[j] * row[j];
    }
    // Basis rows are unit norm, so the squared projection norm is the
    // squared cosine with the span.
    acc += inside;
  }
  return acc / static_cast<double>(pca.rank_m);
}

void save_batch(const SyntheticBatch& batch, const HierarchySpec& spec,
                const std::string& dir) {
  save_matrix(batch.text_embeddings, dir + "/text_embeddings.bin");
  save_matrix(batch.image_embeddings, dir + "/image_embeddings.bin");
  for (std::size_t k = 0; k < batch.layer_components.size(); ++k) {
    save_matrix(batch.layer_components[k],
                dir + "/layer_" + std::to_string(k) + ".bin");
  }
  nlohmann::json manifest;
  manifest["num_layers"] = spec.num_layers;
  manifest["layer_variances"] = spec.layer_variances;
  manifest["dim"] = spec.dim;
  manifest["layer_dims"] = spec.layer_dims;
  manifest["batch_size"] = spec.batch_size;
  manifest["seed"] = spec.seed;
  manifest["disjoint_blocks"] = spec.disjoint_blocks;
  manifest["image_noise"] = spec.image_noise;
  manifest["image_attenuation"] = spec.image_attenuation;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& [begin, end] : batch.layer_blocks) {
    blocks.push_back({begin, end});
  }
  manifest["layer_blocks"] = blocks;
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("save_batch: cannot open manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

std::pair<SyntheticBatch, HierarchySpec> load_batch(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw std::runtime_error("load_batch: missing manifest in " + dir);
  nlohmann::json manifest;
  in >> manifest;

  HierarchySpec spec;
  spec.num_layers = manifest.at("num_layers").get<std::size_t>();
  spec.layer_variances = manifest.at("layer_variances").get<std::vector<double>>();
  spec.dim = manifest.at("dim").get<std::size_t>();
  spec.layer_dims = manifest.at("layer_dims").get<std::vector<std::size_t>>();
  spec.batch_size = manifest.at("batch_size").get<std::size_t>();
  spec.seed = manifest.at("seed").get<std::uint64_t>();
  spec.disjoint_blocks = manifest.at("disjoint_blocks").get<bool>();
  spec.image_noise = manifest.at("image_noise").get<double>();
  spec.image_attenuation = manifest.at("image_attenuation").get<double>();

  SyntheticBatch batch;
  batch.text_embeddings = load_matrix(dir + "/text_embeddings.bin");
  batch.image_embeddings = load_matrix(dir + "/image_embeddings.bin");
  for (std::size_t k = 0; k < spec.num_layers; ++k) {
    batch.layer_components.push_back(
        load_matrix(dir + "/layer_" + std::to_string(k) + ".bin"));
  }
  for (const auto& b : manifest.at("layer_blocks")) {
    batch.layer_blocks.emplace_back(b[0].get<std::size_t>(), b[1].get<std::size_t>());
  }
  return {std::move(batch), std::move(spec)};
}

}  // namespace synth

}  // namespace himo
