#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "himo/matrix.hpp"

namespace himo {

struct SegmentedCaption {
  std::string id;
  std::vector<std::string> sentences;  // n >= 1, no empty sentence
  bool precomputed = false;            // segments came from the dataset file
};

struct ScoreSequence {
  std::string sample_id;
  std::vector<double> scores;  // s_{t_1} .. s_{t_K}
};

struct PearsonResult {
  double value = 0.0;
  bool degenerate = false;  // zero score variance; excluded from means
};

struct HiMoReport {
  std::vector<ScoreSequence> per_sample;
  std::vector<PearsonResult> per_sample_pearson;
  std::optional<double> himo_shallow;  // strict monotone accuracy, percent
  std::optional<double> himo_k_mean;   // mean per-sample Pearson
  std::size_t degenerate_count = 0;
  std::map<std::size_t, double> recall_at;  // K -> percent
  std::optional<double> ssi;
  std::size_t k = 0;
};

namespace metrics {

enum class NoisePosition { kFront, kBack, kRandom };

/// Cumulative subtexts: the caption's n sentences are split into K
/// contiguous segments of floor(n/K) sentences, with the n mod K extra
/// sentences going one each to the LAST segments; subtext k is the
/// concatenation of segments 1..k (joined by a single space).
std::vector<std::string> segment(const SegmentedCaption& caption, std::size_t k);

/// Per-segment sentence counts for the same rule (exposed for tests).
std::vector<std::size_t> segment_sizes(std::size_t n, std::size_t k);

/// Pearson correlation of (1..K) against the scores. Zero score variance
/// flags the result degenerate instead of dividing by zero.
PearsonResult himo_pearson(const ScoreSequence& seq);

/// Strict monotone accuracy (percent) for K = 2 or 3; ties fail.
double himo_shallow(const std::vector<ScoreSequence>& sequences, std::size_t k);

/// Percent of queries whose ground-truth column ranks in the top K of its
/// row; ties rank the lower index first.
double recall_at_k(const Matrix& similarities,
                   const std::vector<std::size_t>& ground_truth, std::size_t k);

/// Mean relative score change (percent) between paired original/noised
/// sequences. Terms with |original| < 1e-9 are skipped; the skip count is
/// reported through `skipped` when non-null.
double ssi(const std::vector<ScoreSequence>& original,
           const std::vector<ScoreSequence>& noised,
           std::size_t* skipped = nullptr);

/// Returns the caption with the distractor sentence inserted at the chosen
/// end (kRandom picks the end from the seed).
SegmentedCaption inject_noise(const SegmentedCaption& caption,
                              const std::string& distractor,
                              NoisePosition position, std::uint64_t seed);

/// Splitter for raw text: sentence ends at '.', '!' or '?' followed by
/// whitespace or end of string. Pre-segmented captions bypass this.
std::vector<std::string> split_sentences(const std::string& text);

}  // namespace metrics

}  // namespace himo
