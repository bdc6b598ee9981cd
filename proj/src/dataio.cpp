#include "himo/dataio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace himo::dataio {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

double round_sig(double value) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return std::strtod(buf, nullptr);
}

CaptionFile parse_captions(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("caption file parse error: ") + e.what());
  }
  if (!j.is_array()) throw std::runtime_error("caption file: top level must be an array");

  CaptionFile file;
  std::unordered_set<std::string> seen;
  for (const auto& entry : j) {
    SegmentedCaption caption;
    caption.id = entry.at("id").get<std::string>();
    caption.precomputed = true;
    if (!seen.insert(caption.id).second) {
      throw std::runtime_error("caption file: duplicate id '" + caption.id + "'");
    }
    const auto& segments = entry.at("segments");
    if (!segments.is_array() || segments.empty()) {
      throw std::runtime_error("caption file: empty segments for id '" + caption.id + "'");
    }
    for (const auto& seg : segments) {
      const auto s = seg.get<std::string>();
      if (s.empty()) {
        throw std::runtime_error("caption file: empty segment string for id '" +
                                 caption.id + "'");
      }
      caption.sentences.push_back(s);
    }
    file.entries.push_back(std::move(caption));
  }
  return file;
}

CaptionFile load_captions(const std::string& path) {
  return parse_captions(read_file(path));
}

std::string captions_to_json(const CaptionFile& file) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& caption : file.entries) {
    j.push_back({{"id", caption.id}, {"segments", caption.sentences}});
  }
  return j.dump(2) + "\n";
}

void save_captions(const CaptionFile& file, const std::string& path) {
  write_file(path, captions_to_json(file));
}

std::string report_to_json(const HiMoReport& report) {
  nlohmann::json j;  // nlohmann::json orders keys, giving stable bytes
  j["k"] = report.k;
  j["sample_count"] = report.per_sample.size();
  j["degenerate_count"] = report.degenerate_count;
  if (report.himo_shallow) j["himo_shallow"] = round_sig(*report.himo_shallow);
  if (report.himo_k_mean) j["himo_k_mean"] = round_sig(*report.himo_k_mean);
  if (report.ssi) j["ssi"] = round_sig(*report.ssi);
  nlohmann::json recalls = nlohmann::json::object();
  for (const auto& [k, value] : report.recall_at) {
    recalls[std::to_string(k)] = round_sig(value);
  }
  j["recall_at"] = recalls;

  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < report.per_sample.size(); ++i) {
    nlohmann::json s;
    s["id"] = report.per_sample[i].sample_id;
    nlohmann::json scores = nlohmann::json::array();
    for (double v : report.per_sample[i].scores) scores.push_back(round_sig(v));
    s["scores"] = scores;
    if (i < report.per_sample_pearson.size()) {
      if (report.per_sample_pearson[i].degenerate) {
        s["pearson"] = nullptr;
      } else {
        s["pearson"] = round_sig(report.per_sample_pearson[i].value);
      }
    }
    samples.push_back(s);
  }
  j["per_sample"] = samples;
  return j.dump(2) + "\n";
}

HiMoReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  HiMoReport report;
  report.k = j.at("k").get<std::size_t>();
  report.degenerate_count = j.at("degenerate_count").get<std::size_t>();
  if (j.contains("himo_shallow")) report.himo_shallow = j["himo_shallow"].get<double>();
  if (j.contains("himo_k_mean")) report.himo_k_mean = j["himo_k_mean"].get<double>();
  if (j.contains("ssi")) report.ssi = j["ssi"].get<double>();
  for (const auto& [key, value] : j.at("recall_at").items()) {
    report.recall_at[std::stoul(key)] = value.get<double>();
  }
  for (const auto& s : j.at("per_sample")) {
    ScoreSequence seq;
    seq.sample_id = s.at("id").get<std::string>();
    seq.scores = s.at("scores").get<std::vector<double>>();
    report.per_sample.push_back(std::move(seq));
    PearsonResult p;
    if (s.contains("pearson") && !s["pearson"].is_null()) {
      p.value = s["pearson"].get<double>();
    } else {
      p.degenerate = true;
    }
    report.per_sample_pearson.push_back(p);
  }
  return report;
}

void write_report(const HiMoReport& report, const std::string& path,
                  ReportFormat format) {
  if (format == ReportFormat::kJson) {
    write_file(path, report_to_json(report));
    return;
  }
  std::ostringstream csv;
  csv << "sample_id,k,score,pearson\n";
  for (std::size_t i = 0; i < report.per_sample.size(); ++i) {
    const auto& seq = report.per_sample[i];
    std::string pearson = "";
    if (i < report.per_sample_pearson.size() && !report.per_sample_pearson[i].degenerate) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6g", report.per_sample_pearson[i].value);
      pearson = buf;
    }
    for (std::size_t k = 0; k < seq.scores.size(); ++k) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6g", seq.scores[k]);
      csv << seq.sample_id << ',' << (k + 1) << ',' << buf << ',' << pearson << '\n';
    }
  }
  write_file(path, csv.str());
}

}  // namespace himo::dataio
