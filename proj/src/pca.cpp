#include "himo/pca.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "himo/kernels.hpp"
#include "himo/svd.hpp"

namespace himo::hide {

PcaModel fit(const Matrix& text_embeddings, double tau) {
  if (text_embeddings.rows() == 0) throw std::invalid_argument("hide::fit: empty batch");
  if (!(tau > 0.0) || tau > 1.0) {
    throw std::invalid_argument("hide::fit: tau must be in (0, 1]");
  }
  text_embeddings.require_finite("hide::fit input");

  const std::size_t n = text_embeddings.rows();
  const std::size_t d = text_embeddings.cols();

  PcaModel model;
  model.tau = tau;
  model.mean = mean_rows(text_embeddings);

  Matrix centered(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::subtract(text_embeddings.row(i).data(), model.mean.data(),
                      centered.row(i).data(), d);
  }

  const double total_variance = kernels::squared_norm(centered.data(), centered.size());
  if (total_variance < kDegenerateVariance) {
    model.singular_values.assign(std::min(n, d), 0.0);
    model.rank_m = 0;
    model.basis = Matrix(0, d);
    return model;
  }

  SvdResult svd = thin_svd(centered);
  model.singular_values = svd.singular_values;

  double total = 0.0;
  for (double s : model.singular_values) total += s * s;
  const std::size_t cap = std::min(n - 1, d);
  std::size_t rank = cap;
  double running = 0.0;
  for (std::size_t i = 0; i < model.singular_values.size(); ++i) {
    running += model.singular_values[i] * model.singular_values[i];
    if (running / total >= tau) {
      rank = std::min(i + 1, cap);
      break;
    }
  }
  model.rank_m = rank;

  model.basis = Matrix(rank, d);
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = 0; j < d; ++j) model.basis(i, j) = svd.vt(i, j);
  }
  return model;
}

std::vector<double> reconstruct(const PcaModel& model, std::span<const double> u) {
  const std::size_t d = model.dim();
  if (u.size() != d) throw std::invalid_argument("hide::reconstruct: dimension mismatch");

  std::vector<double> out = model.mean;
  if (model.rank_m == 0) return out;

  std::vector<double> centered(d);
  kernels::subtract(u.data(), model.mean.data(), centered.data(), d);
  for (std::size_t i = 0; i < model.rank_m; ++i) {
    const double coeff = kernels::dot(model.basis.row(i).data(), centered.data(), d);
    kernels::axpy(coeff, model.basis.row(i).data(), out.data(), d);
  }
  return out;
}

Matrix reconstruct_batch(const PcaModel& model, const Matrix& u) {
  Matrix out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const auto rec = reconstruct(model, u.row(i));
    std::copy(rec.begin(), rec.end(), out.row(i).begin());
  }
  return out;
}

VarianceProfile variance_profile(const PcaModel& model) {
  VarianceProfile profile;
  double total = 0.0;
  for (double s : model.singular_values) total += s * s;
  if (total < kDegenerateVariance) return profile;

  profile.per_component_variance.reserve(model.singular_values.size());
  profile.cumulative_ratio.reserve(model.singular_values.size());
  double running = 0.0;
  for (double s : model.singular_values) {
    const double var = s * s;
    running += var;
    profile.per_component_variance.push_back(var);
    profile.cumulative_ratio.push_back(running / total);
  }
  return profile;
}

std::string to_json(const PcaModel& model) {
  nlohmann::json j;
  j["tau"] = model.tau;
  j["rank_m"] = model.rank_m;
  j["mean"] = model.mean;
  j["singular_values"] = model.singular_values;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < model.basis.rows(); ++i) {
    rows.push_back(std::vector<double>(model.basis.row(i).begin(),
                                       model.basis.row(i).end()));
  }
  j["basis"] = rows;
  j["dim"] = model.dim();
  return j.dump(2);
}

PcaModel from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PcaModel model;
  model.tau = j.at("tau").get<double>();
  model.rank_m = j.at("rank_m").get<std::size_t>();
  model.mean = j.at("mean").get<std::vector<double>>();
  model.singular_values = j.at("singular_values").get<std::vector<double>>();
  const std::size_t d = j.at("dim").get<std::size_t>();
  const auto& rows = j.at("basis");
  Matrix basis(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (row.size() != d) throw std::invalid_argument("PcaModel: basis row size mismatch");
    std::copy(row.begin(), row.end(), basis.row(i).begin());
  }
  model.basis = std::move(basis);
  return model;
}

}  // namespace himo::hide
