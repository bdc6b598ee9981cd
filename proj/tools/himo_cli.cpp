// Command-line front end for the himo library: synthetic data generation,
// dual-encoder training, metric evaluation, theorem verification, and
// ablation sweeps. Exit codes: 0 success, 1 usage, 2 validation, 3 runtime.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "himo/dataio.hpp"
#include "himo/encoders.hpp"
#include "himo/kernels.hpp"
#include "himo/metrics.hpp"
#include "himo/synth.hpp"
#include "himo/trainer.hpp"

namespace fs = std::filesystem;
using namespace himo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

HierarchySpec default_hierarchy() {
  HierarchySpec spec;
  spec.num_layers = 3;
  spec.layer_variances = {10.0, 3.0, 1.0};
  spec.dim = 24;
  spec.layer_dims = {8, 8, 8};
  spec.batch_size = 256;
  spec.seed = 0;
  return spec;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// --config accepts a JSON file path or an inline JSON object.
void apply_config(TrainConfig& config, const std::string& arg) {
  if (arg.empty()) return;
  const bool inline_json = arg.front() == '{';
  config.apply_json_overrides(inline_json ? arg : read_text_file(arg));
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("HIMO_NUM_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Scores CSV (sample_id,k,score[,...]) -> per-sample sequences ordered by k,
// samples in first-appearance order.
std::vector<ScoreSequence> load_score_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty scores file " + path);

  std::vector<std::string> order;
  std::map<std::string, std::map<std::size_t, double>> by_sample;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, k_text, score_text;
    if (!std::getline(row, id, ',') || !std::getline(row, k_text, ',') ||
        !std::getline(row, score_text, ',')) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected sample_id,k,score");
    }
    const std::size_t k = std::stoul(k_text);
    const double score = std::stod(score_text);
    if (by_sample.find(id) == by_sample.end()) order.push_back(id);
    if (!by_sample[id].emplace(k, score).second) {
      throw std::runtime_error(path + ": duplicate (sample, k) = (" + id + ", " +
                               k_text + ")");
    }
  }

  std::vector<ScoreSequence> sequences;
  for (const auto& id : order) {
    ScoreSequence seq;
    seq.sample_id = id;
    for (const auto& [k, score] : by_sample[id]) seq.scores.push_back(score);
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

HiMoReport report_from_sequences(std::vector<ScoreSequence> sequences,
                                 std::size_t k) {
  HiMoReport report;
  report.k = k;
  double pearson_sum = 0.0;
  std::size_t pearson_count = 0;
  for (auto& seq : sequences) {
    if (seq.scores.size() != k) {
      throw std::invalid_argument("sample '" + seq.sample_id + "' has " +
                                  std::to_string(seq.scores.size()) +
                                  " scores, expected " + std::to_string(k));
    }
    const auto p = metrics::himo_pearson(seq);
    if (p.degenerate) {
      ++report.degenerate_count;
    } else {
      pearson_sum += p.value;
      ++pearson_count;
    }
    report.per_sample_pearson.push_back(p);
    report.per_sample.push_back(std::move(seq));
  }
  if (pearson_count > 0) {
    report.himo_k_mean = pearson_sum / static_cast<double>(pearson_count);
  }
  if (k == 2 || k == 3) {
    report.himo_shallow = metrics::himo_shallow(report.per_sample, k);
  }
  return report;
}

// Similarity of a caption's cumulative subtexts against an image proxy built
// from the full caption, through the trained encoders over hashed features.
ScoreSequence caption_scores(const SegmentedCaption& caption, std::size_t k,
                             const EncoderParams& image_encoder,
                             const EncoderParams& text_encoder,
                             std::uint64_t feat_seed) {
  const std::size_t d_in = text_encoder.input_dim();
  const auto subtexts = metrics::segment(caption, k);
  const auto proxy_feat =
      encoders::featurize_text(subtexts.back(), image_encoder.input_dim(), feat_seed);
  const auto v = encoders::encode(image_encoder, proxy_feat.values);

  ScoreSequence seq;
  seq.sample_id = caption.id;
  for (const auto& subtext : subtexts) {
    const auto feat = encoders::featurize_text(subtext, d_in, feat_seed);
    const auto u = encoders::encode(text_encoder, feat.values);
    seq.scores.push_back(kernels::dot(v.data(), u.data(), v.size()));
  }
  return seq;
}

struct AblationRow {
  std::string value;
  std::uint64_t seed = 0;
  double himo_k_mean = 0.0;
  double final_loss = 0.0;
};

std::vector<std::string> axis_values(const std::string& axis) {
  if (axis == "loss_variant") {
    return {"global_only", "comp_only", "global_plus_comp", "global_plus_comp_uv"};
  }
  if (axis == "tau") return {"0.6", "0.7", "0.8", "0.85", "0.9", "0.95"};
  if (axis == "lambda") return {"0.1", "0.5", "1.0", "2.0"};
  if (axis == "batch_size") return {"32", "64", "128"};
  throw std::invalid_argument("unknown ablation axis '" + axis + "'");
}

void apply_axis(TrainConfig& config, const std::string& axis,
                const std::string& value) {
  if (axis == "loss_variant") {
    config.loss_variant = loss_variant_from_string(value);
  } else if (axis == "tau") {
    config.tau = std::stod(value);
  } else if (axis == "lambda") {
    config.lambda = std::stod(value);
  } else if (axis == "batch_size") {
    config.batch_size = std::stoul(value);
  }
}

AblationRow run_ablation_job(const TrainConfig& base, const std::string& axis,
                             const std::string& value, std::uint64_t seed) {
  TrainConfig config = base;
  apply_axis(config, axis, value);
  config.seed = seed;

  auto spec = default_hierarchy();
  spec.seed = seed;
  const auto train_data = synth::generate_hierarchical_batch(spec);
  auto heldout_spec = spec;
  heldout_spec.seed = seed + 1000;
  heldout_spec.batch_size = 128;
  const auto heldout = synth::generate_hierarchical_batch(heldout_spec);

  const auto trace = trainer::run_training(config, train_data);
  const auto report =
      trainer::evaluate_himo(trace.image_encoder, trace.text_encoder, heldout);

  AblationRow row;
  row.value = value;
  row.seed = seed;
  row.himo_k_mean = report.himo_k_mean.value_or(0.0);
  row.final_loss = trace.steps.empty() ? 0.0 : trace.steps.back().loss_total;
  return row;
}

std::string format_g(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

int cmd_gen_data(const HierarchySpec& spec, const std::string& out_dir) {
  spec.validate();
  fs::create_directories(out_dir);
  const auto batch = synth::generate_hierarchical_batch(spec);
  synth::save_batch(batch, spec, out_dir);
  std::cout << "wrote " << spec.batch_size << " samples (dim " << spec.dim << ", "
            << spec.num_layers << " layers) to " << out_dir << "\n";
  return kExitOk;
}

int cmd_train(const TrainConfig& config, const std::string& data_dir,
              const std::string& out_dir) {
  const auto [data, spec] = synth::load_batch(data_dir);
  const auto trace = trainer::run_training(config, data);
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "trace.jsonl").string(), trace.to_jsonl());
  write_text_file((fs::path(out_dir) / "config.json").string(),
                  config.to_json() + "\n");
  encoders::save_params(trace.image_encoder, out_dir, "image_encoder");
  encoders::save_params(trace.text_encoder, out_dir, "text_encoder");
  std::cout << "trained " << trace.steps.size() << " steps; final loss "
            << format_g(trace.steps.back().loss_total) << "; checkpoints in "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_eval_himo(const std::string& model_dir, const std::string& data_dir,
                  const std::string& captions_path, const std::string& scores_path,
                  std::size_t k, std::uint64_t seed, const std::string& out_dir) {
  HiMoReport report;
  if (!scores_path.empty()) {
    if (captions_path.empty() && k == 0) {
      throw std::invalid_argument("--scores needs --k (sequence length)");
    }
    auto sequences = load_score_csv(scores_path);
    if (k == 0 && !sequences.empty()) k = sequences.front().scores.size();
    report = report_from_sequences(std::move(sequences), k);
  } else if (!captions_path.empty()) {
    if (model_dir.empty()) {
      throw std::invalid_argument("--captions without --scores needs --model");
    }
    if (k == 0) k = 3;
    const auto image_encoder = encoders::load_params(model_dir, "image_encoder");
    const auto text_encoder = encoders::load_params(model_dir, "text_encoder");
    const auto captions = dataio::load_captions(captions_path);
    std::vector<ScoreSequence> sequences;
    for (const auto& caption : captions.entries) {
      sequences.push_back(
          caption_scores(caption, k, image_encoder, text_encoder, seed));
    }
    report = report_from_sequences(std::move(sequences), k);
  } else {
    if (model_dir.empty() || data_dir.empty()) {
      throw std::invalid_argument(
          "eval-himo needs --scores, --captions, or --model with --data");
    }
    const auto image_encoder = encoders::load_params(model_dir, "image_encoder");
    const auto text_encoder = encoders::load_params(model_dir, "text_encoder");
    const auto [data, spec] = synth::load_batch(data_dir);
    report = trainer::evaluate_himo(image_encoder, text_encoder, data);
  }

  fs::create_directories(out_dir);
  const auto json_path = (fs::path(out_dir) / "himo_report.json").string();
  dataio::write_report(report, json_path, dataio::ReportFormat::kJson);
  dataio::write_report(report, (fs::path(out_dir) / "himo_report.csv").string(),
                       dataio::ReportFormat::kCsv);
  std::cout << "himo_k_mean "
            << (report.himo_k_mean ? format_g(*report.himo_k_mean) : "n/a");
  if (report.himo_shallow) {
    std::cout << "; himo_shallow " << format_g(*report.himo_shallow);
  }
  std::cout << "; report " << json_path << "\n";
  return kExitOk;
}

int cmd_eval_ssi(const std::string& model_dir, const std::string& captions_path,
                 const std::string& ori_scores, const std::string& noised_scores,
                 const std::string& distractor, const std::string& position_name,
                 std::size_t k, std::uint64_t seed, const std::string& out_dir) {
  std::vector<ScoreSequence> ori, noised;
  if (!ori_scores.empty() || !noised_scores.empty()) {
    if (ori_scores.empty() || noised_scores.empty()) {
      throw std::invalid_argument("--ori-scores and --noised-scores go together");
    }
    ori = load_score_csv(ori_scores);
    noised = load_score_csv(noised_scores);
  } else {
    if (model_dir.empty() || captions_path.empty()) {
      throw std::invalid_argument(
          "eval-ssi needs --model with --captions, or score CSVs");
    }
    metrics::NoisePosition position = metrics::NoisePosition::kRandom;
    if (position_name == "front") position = metrics::NoisePosition::kFront;
    else if (position_name == "back") position = metrics::NoisePosition::kBack;
    else if (position_name != "random") {
      throw std::invalid_argument("--position must be front, back or random");
    }
    const auto image_encoder = encoders::load_params(model_dir, "image_encoder");
    const auto text_encoder = encoders::load_params(model_dir, "text_encoder");
    const auto captions = dataio::load_captions(captions_path);
    for (const auto& caption : captions.entries) {
      ori.push_back(caption_scores(caption, k, image_encoder, text_encoder, seed));
      const auto perturbed =
          metrics::inject_noise(caption, distractor, position,
                                seed ^ std::hash<std::string>{}(caption.id));
      noised.push_back(
          caption_scores(perturbed, k, image_encoder, text_encoder, seed));
    }
  }

  std::size_t skipped = 0;
  const double value = metrics::ssi(ori, noised, &skipped);

  HiMoReport report;
  report.k = ori.empty() ? 0 : ori.front().scores.size();
  report.per_sample = ori;
  for (const auto& seq : ori) {
    report.per_sample_pearson.push_back(metrics::himo_pearson(seq));
  }
  report.ssi = value;
  fs::create_directories(out_dir);
  const auto json_path = (fs::path(out_dir) / "ssi_report.json").string();
  dataio::write_report(report, json_path, dataio::ReportFormat::kJson);
  std::cout << "ssi " << format_g(value) << " (skipped " << skipped
            << " near-zero terms); report " << json_path << "\n";
  return kExitOk;
}

int cmd_eval_retrieval(const std::string& model_dir, const std::string& data_dir,
                       const std::vector<std::size_t>& ks,
                       const std::string& out_dir) {
  const auto image_encoder = encoders::load_params(model_dir, "image_encoder");
  const auto text_encoder = encoders::load_params(model_dir, "text_encoder");
  const auto [data, spec] = synth::load_batch(data_dir);
  const auto report =
      trainer::evaluate_retrieval(image_encoder, text_encoder, data, ks);

  fs::create_directories(out_dir);
  const auto json_path = (fs::path(out_dir) / "retrieval_report.json").string();
  dataio::write_report(report, json_path, dataio::ReportFormat::kJson);
  std::cout << "recall:";
  for (const auto& [k, value] : report.recall_at) {
    std::cout << " R@" << k << "=" << format_g(value);
  }
  std::cout << "; report " << json_path << "\n";
  return kExitOk;
}

int cmd_verify_theory(std::size_t chains, std::size_t dim, std::size_t k,
                      std::uint64_t seed, const std::string& out_dir) {
  if (chains == 0 || dim < 2 || k < 2) {
    throw std::invalid_argument("verify-theory: chains >= 1, dim >= 2, k >= 2");
  }
  std::size_t passes = 0;
  std::vector<std::uint64_t> failures;
  for (std::uint64_t i = 0; i < chains; ++i) {
    const auto chain = synth::generate_residual_chain(dim, k, seed + i);
    if (synth::verify_monotone(chain).strictly_increasing) {
      ++passes;
    } else if (failures.size() < 16) {
      failures.push_back(seed + i);
    }
  }
  const double pass_rate =
      static_cast<double>(passes) / static_cast<double>(chains);

  nlohmann::json j;
  j["chains"] = chains;
  j["dim"] = dim;
  j["k"] = k;
  j["seed"] = seed;
  j["passes"] = passes;
  j["pass_rate"] = pass_rate;
  j["failing_seeds"] = failures;
  fs::create_directories(out_dir);
  const auto path = (fs::path(out_dir) / "theory_report.json").string();
  write_text_file(path, j.dump(2) + "\n");
  std::cout << "pass_rate " << format_g(pass_rate) << " (" << passes << "/"
            << chains << "); report " << path << "\n";
  return pass_rate == 1.0 ? kExitOk : kExitRuntime;
}

int cmd_ablate(const TrainConfig& base, const std::string& axis,
               std::size_t seeds, const std::string& out_dir) {
  const auto values = axis_values(axis);

  struct Job {
    std::string value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& value : values) {
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
      jobs.push_back({value, base.seed + seed});
    }
  }

  std::vector<AblationRow> rows(jobs.size());
  const std::size_t workers = std::min(thread_budget(), jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1)) {
          rows[i] = run_ablation_job(base, axis, jobs[i].value, jobs[i].seed);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  csv << "axis,value,seed,himo_k_mean,final_loss\n";
  for (const auto& row : rows) {
    csv << axis << ',' << row.value << ',' << row.seed << ','
        << format_g(dataio::round_sig(row.himo_k_mean)) << ','
        << format_g(dataio::round_sig(row.final_loss)) << '\n';
  }
  for (const auto& value : values) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& row : rows) {
      if (row.value == value) {
        sum += row.himo_k_mean;
        ++count;
      }
    }
    csv << axis << ',' << value << ",mean,"
        << format_g(dataio::round_sig(sum / static_cast<double>(count))) << ",\n";
  }

  fs::create_directories(out_dir);
  const auto path = (fs::path(out_dir) / "ablation.csv").string();
  write_text_file(path, csv.str());
  std::cout << "ablation over " << axis << ": " << jobs.size() << " runs; "
            << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical decomposition + monotone contrastive toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // parent options (e.g. --out) usable after a subcommand

  std::string out_dir = "out";
  app.add_option("--out", out_dir, "output directory root")->capture_default_str();

  // gen-data
  auto spec = default_hierarchy();
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic layered batch");
  gen->add_option("--layers", spec.num_layers, "number of semantic layers")
      ->capture_default_str();
  gen->add_option("--variances", spec.layer_variances,
                  "per-layer variances, strictly decreasing")
      ->capture_default_str();
  gen->add_option("--dim", spec.dim, "embedding dimension")->capture_default_str();
  gen->add_option("--layer-dims", spec.layer_dims, "per-layer block widths")
      ->capture_default_str();
  gen->add_option("--n", spec.batch_size, "sample count")->capture_default_str();
  gen->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  gen->add_option("--noise", spec.image_noise, "image perturbation stddev")
      ->capture_default_str();
  gen->add_option("--attenuation", spec.image_attenuation,
                  "damping of lower layers in the image")
      ->capture_default_str();
  gen->add_flag("!--no-blocks", spec.disjoint_blocks,
                "use random decorrelated directions instead of blocks");

  // train
  TrainConfig train_config;
  std::string train_data_dir, train_config_arg;
  std::uint64_t train_seed = 0;
  bool train_seed_set = false;
  auto* train = app.add_subcommand("train", "train the dual encoders");
  train->add_option("--data", train_data_dir, "gen-data output directory")
      ->required();
  train->add_option("--config", train_config_arg,
                    "JSON config file or inline JSON overrides");
  train->add_option("--seed", train_seed, "random seed (overrides config)")
      ->each([&](const std::string&) { train_seed_set = true; });

  // eval-himo
  std::string eh_model, eh_data, eh_captions, eh_scores;
  std::size_t eh_k = 0;
  std::uint64_t eh_seed = 0;
  auto* eval_himo = app.add_subcommand(
      "eval-himo", "hierarchical monotonicity metrics (HiMo@K)");
  eval_himo->add_option("--model", eh_model, "checkpoint directory from train");
  eval_himo->add_option("--data", eh_data, "gen-data directory (model mode)");
  eval_himo->add_option("--captions", eh_captions, "caption-segments JSON");
  eval_himo->add_option("--scores", eh_scores,
                        "external scores CSV (sample_id,k,score)");
  eval_himo->add_option("--k", eh_k, "number of cumulative subtexts");
  eval_himo->add_option("--seed", eh_seed, "featurizer seed")
      ->capture_default_str();

  // eval-ssi
  std::string es_model, es_captions, es_ori, es_noised, es_position = "random";
  std::string es_distractor =
      "A completely unrelated remark about quarterly accounting.";
  std::size_t es_k = 3;
  std::uint64_t es_seed = 0;
  auto* eval_ssi =
      app.add_subcommand("eval-ssi", "semantic stability under noise injection");
  eval_ssi->add_option("--model", es_model, "checkpoint directory from train");
  eval_ssi->add_option("--captions", es_captions, "caption-segments JSON");
  eval_ssi->add_option("--ori-scores", es_ori, "original scores CSV");
  eval_ssi->add_option("--noised-scores", es_noised, "perturbed scores CSV");
  eval_ssi->add_option("--distractor", es_distractor, "sentence to inject")
      ->capture_default_str();
  eval_ssi->add_option("--position", es_position, "front | back | random")
      ->capture_default_str();
  eval_ssi->add_option("--k", es_k, "number of cumulative subtexts")
      ->capture_default_str();
  eval_ssi->add_option("--seed", es_seed, "featurizer / position seed")
      ->capture_default_str();

  // eval-retrieval
  std::string er_model, er_data;
  std::vector<std::size_t> er_ks{1, 5, 10};
  auto* eval_retrieval =
      app.add_subcommand("eval-retrieval", "text-to-image Recall@K");
  eval_retrieval->add_option("--model", er_model, "checkpoint directory")
      ->required();
  eval_retrieval->add_option("--data", er_data, "gen-data directory")->required();
  eval_retrieval->add_option("--ks", er_ks, "recall cutoffs")
      ->capture_default_str();

  // verify-theory
  std::size_t vt_chains = 1000, vt_dim = 32, vt_k = 6;
  std::uint64_t vt_seed = 0;
  auto* verify = app.add_subcommand(
      "verify-theory", "check cosine monotonicity on random residual chains");
  verify->add_option("--chains", vt_chains, "number of chains")
      ->capture_default_str();
  verify->add_option("--dim", vt_dim, "chain dimension")->capture_default_str();
  verify->add_option("--k", vt_k, "levels per chain")->capture_default_str();
  verify->add_option("--seed", vt_seed, "base seed")->capture_default_str();

  // ablate
  std::string ab_axis = "loss_variant", ab_config_arg;
  std::size_t ab_seeds = 5;
  std::uint64_t ab_seed = 0;
  auto* ablate = app.add_subcommand("ablate", "sweep one config axis over seeds");
  ablate
      ->add_option("--axis", ab_axis,
                   "loss_variant | tau | lambda | batch_size")
      ->capture_default_str();
  ablate->add_option("--seeds", ab_seeds, "seeds per value")->capture_default_str();
  ablate->add_option("--seed", ab_seed, "base seed")->capture_default_str();
  ablate->add_option("--config", ab_config_arg,
                     "JSON config file or inline JSON overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(spec, out_dir);
    if (train->parsed()) {
      apply_config(train_config, train_config_arg);
      if (train_seed_set) train_config.seed = train_seed;
      train_config.validate();
      return cmd_train(train_config, train_data_dir, out_dir);
    }
    if (eval_himo->parsed()) {
      return cmd_eval_himo(eh_model, eh_data, eh_captions, eh_scores, eh_k,
                           eh_seed, out_dir);
    }
    if (eval_ssi->parsed()) {
      return cmd_eval_ssi(es_model, es_captions, es_ori, es_noised,
                          es_distractor, es_position, es_k, es_seed, out_dir);
    }
    if (eval_retrieval->parsed()) {
      return cmd_eval_retrieval(er_model, er_data, er_ks, out_dir);
    }
    if (verify->parsed()) {
      return cmd_verify_theory(vt_chains, vt_dim, vt_k, vt_seed, out_dir);
    }
    if (ablate->parsed()) {
      TrainConfig base;
      apply_config(base, ab_config_arg);
      base.seed = ab_seed;
      return cmd_ablate(base, ab_axis, ab_seeds, out_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
