#include <doctest.h>

#include <cmath>
#include <random>

#include "himo/metrics.hpp"
#include "oracles.hpp"

using namespace himo;

namespace {

SegmentedCaption caption_with(std::size_t n) {
  SegmentedCaption c;
  c.id = "probe";
  for (std::size_t i = 1; i <= n; ++i) {
    c.sentences.push_back("sentence " + std::to_string(i) + ".");
  }
  return c;
}

}  // namespace

TEST_CASE("segment_sizes: remainder goes to the last segments") {
  CHECK(metrics::segment_sizes(5, 3) == std::vector<std::size_t>{1, 2, 2});
  CHECK(metrics::segment_sizes(6, 2) == std::vector<std::size_t>{3, 3});
  CHECK(metrics::segment_sizes(4, 4) == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(metrics::segment_sizes(7, 3) == std::vector<std::size_t>{2, 2, 3});
  CHECK(metrics::segment_sizes(2, 2) == std::vector<std::size_t>{1, 1});
}

TEST_CASE("segment: cumulative subtexts are nested prefixes of the caption") {
  const auto caption = caption_with(5);
  const auto subtexts = metrics::segment(caption, 3);
  REQUIRE(subtexts.size() == 3);
  CHECK(subtexts[0] == "sentence 1.");
  CHECK(subtexts[1] == "sentence 1. sentence 2. sentence 3.");
  CHECK(subtexts[2] ==
        "sentence 1. sentence 2. sentence 3. sentence 4. sentence 5.");
  // Nesting: each subtext is a prefix of the next.
  for (std::size_t k = 1; k < subtexts.size(); ++k) {
    CHECK(subtexts[k].rfind(subtexts[k - 1], 0) == 0);
  }
}

TEST_CASE("segment rejects n < K") {
  CHECK_THROWS_AS(metrics::segment(caption_with(2), 3), std::invalid_argument);
  CHECK_THROWS_AS(metrics::segment(caption_with(4), 1), std::invalid_argument);
}

TEST_CASE("himo_pearson on monotone and oracle sequences") {
  ScoreSequence up{"a", {0.1, 0.2, 0.4, 0.5, 0.9}};
  CHECK(metrics::himo_pearson(up).value < 1.0 + 1e-12);
  ScoreSequence strict_up{"a", {1, 2, 3, 4}};
  CHECK(metrics::himo_pearson(strict_up).value == doctest::Approx(1.0).epsilon(1e-12));
  ScoreSequence strict_down{"a", {4, 3, 2, 1}};
  CHECK(metrics::himo_pearson(strict_down).value ==
        doctest::Approx(-1.0).epsilon(1e-12));

  ScoreSequence mixed{"a", {0.2, 0.5, 0.4, 0.9, 1.0}};
  const auto result = metrics::himo_pearson(mixed);
  CHECK_FALSE(result.degenerate);
  CHECK(result.value ==
        doctest::Approx(oracles::textbook_pearson_vs_index(mixed.scores))
            .epsilon(1e-12));
}

TEST_CASE("himo_pearson flags zero-variance sequences as degenerate") {
  ScoreSequence flat{"a", {0.7, 0.7, 0.7, 0.7}};
  const auto result = metrics::himo_pearson(flat);
  CHECK(result.degenerate);
}

TEST_CASE("himo_pearson is invariant to positive affine transforms") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    ScoreSequence seq{"a", {}};
    for (int i = 0; i < 6; ++i) seq.scores.push_back(gauss(rng));
    const double a = pos(rng), b = gauss(rng);
    ScoreSequence mapped = seq;
    for (double& s : mapped.scores) s = a * s + b;
    CHECK(metrics::himo_pearson(mapped).value ==
          doctest::Approx(metrics::himo_pearson(seq).value).epsilon(1e-9));
  }
}

TEST_CASE("himo_shallow: strict inequalities, ties fail") {
  std::vector<ScoreSequence> seqs{
      {"a", {0.1, 0.2}}, {"b", {0.2, 0.2}}, {"c", {0.3, 0.1}}, {"d", {0.0, 0.5}}};
  CHECK(metrics::himo_shallow(seqs, 2) == doctest::Approx(50.0).epsilon(1e-12));

  std::vector<ScoreSequence> quarter{
      {"a", {0.1, 0.2}}, {"b", {0.2, 0.2}}, {"c", {0.1, 0.3}}, {"d", {0.0, 0.5}}};
  CHECK(metrics::himo_shallow(quarter, 2) == doctest::Approx(75.0).epsilon(1e-12));

  std::vector<ScoreSequence> k3{{"a", {0.1, 0.2, 0.3}}, {"b", {0.1, 0.3, 0.2}}};
  CHECK(metrics::himo_shallow(k3, 3) == doctest::Approx(50.0).epsilon(1e-12));

  std::vector<ScoreSequence> flat{{"a", {0.5, 0.5}}, {"b", {0.5, 0.5}}};
  CHECK(metrics::himo_shallow(flat, 2) == 0.0);
}

TEST_CASE("himo_shallow rejects mixed lengths and unsupported K") {
  std::vector<ScoreSequence> mixed{{"a", {0.1, 0.2}}, {"b", {0.1, 0.2, 0.3}}};
  CHECK_THROWS_AS(metrics::himo_shallow(mixed, 2), std::invalid_argument);
  std::vector<ScoreSequence> ok{{"a", {0.1, 0.2, 0.3, 0.4}}};
  CHECK_THROWS_AS(metrics::himo_shallow(ok, 4), std::invalid_argument);
}

TEST_CASE("himo_shallow is invariant to strictly increasing transforms") {
  std::vector<ScoreSequence> seqs{
      {"a", {0.1, 0.2, 0.5}}, {"b", {0.4, 0.3, 0.6}}, {"c", {-1.0, 0.0, 2.0}}};
  const double before = metrics::himo_shallow(seqs, 3);
  for (auto& s : seqs) {
    for (double& x : s.scores) x = std::exp(3.0 * x);  // strictly increasing
  }
  CHECK(metrics::himo_shallow(seqs, 3) == before);
}

TEST_CASE("recall_at_k: identity, worst case, and the sorting oracle") {
  Matrix eye(6, 6);
  for (std::size_t i = 0; i < 6; ++i) eye(i, i) = 1.0;
  std::vector<std::size_t> gt{0, 1, 2, 3, 4, 5};
  CHECK(metrics::recall_at_k(eye, gt, 1) == 100.0);

  // Ground truth always ranked last.
  Matrix worst(10, 10);
  std::vector<std::size_t> gt10(10);
  for (std::size_t i = 0; i < 10; ++i) {
    gt10[i] = i;
    for (std::size_t j = 0; j < 10; ++j) worst(i, j) = (j == i) ? -1.0 : double(j);
  }
  CHECK(metrics::recall_at_k(worst, gt10, 1) == 0.0);
  CHECK(metrics::recall_at_k(worst, gt10, 10) == 100.0);

  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix scores = oracles::random_matrix(8, 8, rng);
    std::vector<std::size_t> truth(8);
    std::uniform_int_distribution<std::size_t> idx(0, 7);
    for (auto& t : truth) t = idx(rng);
    for (std::size_t k : {1u, 3u, 5u}) {
      CHECK(metrics::recall_at_k(scores, truth, k) ==
            oracles::brute_force_recall(scores, truth, k));
    }
  }
}

TEST_CASE("recall_at_k breaks ties by lower index") {
  Matrix tied(1, 3);
  tied(0, 0) = 0.5;
  tied(0, 1) = 0.5;
  tied(0, 2) = 0.5;
  CHECK(metrics::recall_at_k(tied, {0}, 1) == 100.0);
  CHECK(metrics::recall_at_k(tied, {1}, 1) == 0.0);
  CHECK(metrics::recall_at_k(tied, {1}, 2) == 100.0);
  CHECK_THROWS_AS(metrics::recall_at_k(tied, {0}, 4), std::invalid_argument);
}

TEST_CASE("ssi hand examples") {
  std::vector<ScoreSequence> ori{{"a", {0.5}}};
  std::vector<ScoreSequence> noised{{"a", {0.4}}};
  CHECK(metrics::ssi(ori, noised) == doctest::Approx(20.0).epsilon(1e-12));

  std::vector<ScoreSequence> ori2{{"a", {0.5}}, {"b", {1.0}}};
  std::vector<ScoreSequence> noised2{{"a", {0.4}}, {"b", {1.1}}};
  CHECK(metrics::ssi(ori2, noised2) == doctest::Approx(15.0).epsilon(1e-12));

  // Identical inputs: exactly zero.
  CHECK(metrics::ssi(ori2, ori2) == 0.0);
}

TEST_CASE("ssi skips near-zero original scores and counts them") {
  std::vector<ScoreSequence> ori{{"a", {0.5, 1e-12}}};
  std::vector<ScoreSequence> noised{{"a", {0.4, 0.3}}};
  std::size_t skipped = 0;
  const double value = metrics::ssi(ori, noised, &skipped);
  CHECK(skipped == 1);
  CHECK(value == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("ssi scales linearly in the perturbation") {
  std::vector<ScoreSequence> ori{{"a", {0.5, 0.8}}, {"b", {1.0, 0.4}}};
  std::vector<ScoreSequence> small = ori, large = ori;
  const std::vector<std::vector<double>> delta{{0.02, -0.05}, {0.1, 0.01}};
  for (std::size_t i = 0; i < ori.size(); ++i) {
    for (std::size_t j = 0; j < ori[i].scores.size(); ++j) {
      small[i].scores[j] += delta[i][j];
      large[i].scores[j] += 3.0 * delta[i][j];
    }
  }
  CHECK(metrics::ssi(ori, large) ==
        doctest::Approx(3.0 * metrics::ssi(ori, small)).epsilon(1e-12));
}

TEST_CASE("ssi rejects mismatched pairings") {
  std::vector<ScoreSequence> ori{{"a", {0.5, 0.8}}};
  std::vector<ScoreSequence> wrong_len{{"a", {0.5}}};
  std::vector<ScoreSequence> wrong_count{};
  CHECK_THROWS_AS(metrics::ssi(ori, wrong_len), std::invalid_argument);
  CHECK_THROWS_AS(metrics::ssi(ori, wrong_count), std::invalid_argument);
}

TEST_CASE("inject_noise puts the distractor at the chosen end") {
  const auto caption = caption_with(3);
  const auto front = metrics::inject_noise(caption, "Unrelated fact.",
                                           metrics::NoisePosition::kFront, 0);
  REQUIRE(front.sentences.size() == 4);
  CHECK(front.sentences.front() == "Unrelated fact.");
  CHECK(front.sentences[1] == caption.sentences[0]);

  const auto back = metrics::inject_noise(caption, "Unrelated fact.",
                                          metrics::NoisePosition::kBack, 0);
  CHECK(back.sentences.back() == "Unrelated fact.");

  const auto r1 = metrics::inject_noise(caption, "X.", metrics::NoisePosition::kRandom, 7);
  const auto r2 = metrics::inject_noise(caption, "X.", metrics::NoisePosition::kRandom, 7);
  CHECK(r1.sentences == r2.sentences);
}

TEST_CASE("split_sentences handles terminators and trailing text") {
  const auto parts = metrics::split_sentences("A red car. Two birds! Rain? End");
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == "A red car.");
  CHECK(parts[1] == "Two birds!");
  CHECK(parts[2] == "Rain?");
  CHECK(parts[3] == "End");

  CHECK(metrics::split_sentences("").empty());
  CHECK(metrics::split_sentences("One sentence only.").size() == 1);
  // A period not followed by whitespace does not split (e.g. decimals).
  CHECK(metrics::split_sentences("Version 2.5 works.").size() == 1);
}
