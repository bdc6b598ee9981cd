#include "himo/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>

namespace himo::metrics {

std::vector<std::size_t> segment_sizes(std::size_t n, std::size_t k) {
  if (k < 2) throw std::invalid_argument("segment: K must be >= 2");
  if (n < k) throw std::invalid_argument("segment: caption has fewer sentences than K");
  std::vector<std::size_t> sizes(k, n / k);
  // The n mod k remainder goes one each to the last segments.
  const std::size_t rem = n % k;
  for (std::size_t i = 0; i < rem; ++i) sizes[k - 1 - i] += 1;
  return sizes;
}

std::vector<std::string> segment(const SegmentedCaption& caption, std::size_t k) {
  for (const auto& s : caption.sentences) {
    if (s.empty()) {
      throw std::invalid_argument("segment: empty sentence in caption " + caption.id);
    }
  }
  const auto sizes = segment_sizes(caption.sentences.size(), k);
  std::vector<std::string> subtexts;
  subtexts.reserve(k);
  std::string acc;
  std::size_t idx = 0;
  for (std::size_t seg = 0; seg < k; ++seg) {
    for (std::size_t i = 0; i < sizes[seg]; ++i, ++idx) {
      if (!acc.empty()) acc += ' ';
      acc += caption.sentences[idx];
    }
    subtexts.push_back(acc);
  }
  return subtexts;
}

PearsonResult himo_pearson(const ScoreSequence& seq) {
  const std::size_t k = seq.scores.size();
  if (k < 2) throw std::invalid_argument("himo_pearson: need at least 2 scores");

  double mean_k = 0.0, mean_s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mean_k += static_cast<double>(i + 1);
    mean_s += seq.scores[i];
  }
  mean_k /= static_cast<double>(k);
  mean_s /= static_cast<double>(k);

  double cov = 0.0, var_k = 0.0, var_s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dk = static_cast<double>(i + 1) - mean_k;
    const double ds = seq.scores[i] - mean_s;
    cov += dk * ds;
    var_k += dk * dk;
    var_s += ds * ds;
  }

  PearsonResult result;
  if (var_s <= 0.0) {
    result.degenerate = true;
    return result;
  }
  result.value = cov / (std::sqrt(var_k) * std::sqrt(var_s));
  return result;
}

double himo_shallow(const std::vector<ScoreSequence>& sequences, std::size_t k) {
  if (k != 2 && k != 3) throw std::invalid_argument("himo_shallow: K must be 2 or 3");
  if (sequences.empty()) throw std::invalid_argument("himo_shallow: no sequences");
  std::size_t pass = 0;
  for (const auto& seq : sequences) {
    if (seq.scores.size() != k) {
      throw std::invalid_argument("himo_shallow: sequence length != K for sample " +
                                  seq.sample_id);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < k; ++i) {
      if (!(seq.scores[i - 1] < seq.scores[i])) {
        monotone = false;
        break;
      }
    }
    if (monotone) ++pass;
  }
  return 100.0 * static_cast<double>(pass) / static_cast<double>(sequences.size());
}

double recall_at_k(const Matrix& similarities,
                   const std::vector<std::size_t>& ground_truth, std::size_t k) {
  const std::size_t nq = similarities.rows();
  const std::size_t ng = similarities.cols();
  if (ground_truth.size() != nq) {
    throw std::invalid_argument("recall_at_k: ground truth size mismatch");
  }
  if (k == 0 || k > ng) throw std::invalid_argument("recall_at_k: K out of range");

  std::size_t hits = 0;
  for (std::size_t i = 0; i < nq; ++i) {
    const std::size_t gt = ground_truth[i];
    if (gt >= ng) throw std::invalid_argument("recall_at_k: ground-truth index out of range");
    const double gt_score = similarities(i, gt);
    std::size_t rank = 1;
    for (std::size_t j = 0; j < ng; ++j) {
      if (j == gt) continue;
      if (similarities(i, j) > gt_score ||
          (similarities(i, j) == gt_score && j < gt)) {
        ++rank;
      }
    }
    if (rank <= k) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(nq);
}

double ssi(const std::vector<ScoreSequence>& original,
           const std::vector<ScoreSequence>& noised, std::size_t* skipped) {
  if (original.size() != noised.size() || original.empty()) {
    throw std::invalid_argument("ssi: paired lists required");
  }
  constexpr double kEps = 1e-9;
  std::size_t skip_count = 0;
  double total = 0.0;
  std::size_t samples = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original[i].scores.size() != noised[i].scores.size()) {
      throw std::invalid_argument("ssi: per-sample length mismatch for sample " +
                                  original[i].sample_id);
    }
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < original[i].scores.size(); ++j) {
      const double ori = original[i].scores[j];
      if (std::abs(ori) < kEps) {
        ++skip_count;
        continue;
      }
      acc += std::abs((ori - noised[i].scores[j]) / ori);
      ++used;
    }
    if (used > 0) {
      total += acc / static_cast<double>(used) * 100.0;
      ++samples;
    }
  }
  if (skipped) *skipped = skip_count;
  if (samples == 0) throw std::invalid_argument("ssi: all terms skipped");
  return total / static_cast<double>(samples);
}

SegmentedCaption inject_noise(const SegmentedCaption& caption,
                              const std::string& distractor,
                              NoisePosition position, std::uint64_t seed) {
  if (distractor.empty()) throw std::invalid_argument("inject_noise: empty distractor");
  SegmentedCaption out = caption;
  bool front = position == NoisePosition::kFront;
  if (position == NoisePosition::kRandom) {
    std::mt19937_64 rng(seed);
    front = (rng() & 1u) == 0;
  }
  if (front) {
    out.sentences.insert(out.sentences.begin(), distractor);
  } else {
    out.sentences.push_back(distractor);
  }
  return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    current += text[i];
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      const bool at_end = i + 1 == text.size();
      const bool before_space = !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
      if (at_end || before_space) {
        // Trim surrounding whitespace.
        const auto begin = current.find_first_not_of(" \t\n\r");
        const auto end = current.find_last_not_of(" \t\n\r");
        if (begin != std::string::npos) {
          sentences.push_back(current.substr(begin, end - begin + 1));
        }
        current.clear();
      }
    }
  }
  const auto begin = current.find_first_not_of(" \t\n\r");
  if (begin != std::string::npos) {
    const auto end = current.find_last_not_of(" \t\n\r");
    sentences.push_back(current.substr(begin, end - begin + 1));
  }
  return sentences;
}

}  // namespace himo::metrics
