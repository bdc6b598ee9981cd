#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "himo/dataio.hpp"

using namespace himo;

namespace {

CaptionFile sample_file() {
  CaptionFile file;
  file.entries.push_back({"cap-1", {"A red car.", "It is parked."}, true});
  file.entries.push_back({"cap-2", {"Two birds fly.", "The sky is blue.", "Wind."}, true});
  return file;
}

}  // namespace

TEST_CASE("caption JSON round-trip preserves ids and segments") {
  const auto file = sample_file();
  const auto parsed = dataio::parse_captions(dataio::captions_to_json(file));
  REQUIRE(parsed.entries.size() == 2);
  CHECK(parsed.entries[0].id == "cap-1");
  CHECK(parsed.entries[0].sentences == file.entries[0].sentences);
  CHECK(parsed.entries[1].sentences == file.entries[1].sentences);
  CHECK(parsed.entries[0].precomputed);
}

TEST_CASE("caption file round-trip through disk") {
  const auto path =
      (std::filesystem::temp_directory_path() / "himo_captions_test.json").string();
  dataio::save_captions(sample_file(), path);
  const auto loaded = dataio::load_captions(path);
  CHECK(loaded.entries.size() == 2);
  CHECK(loaded.entries[1].id == "cap-2");
  std::filesystem::remove(path);
}

TEST_CASE("parse_captions rejects duplicates and empties, naming the id") {
  const char* duplicate = R"([
    {"id": "x", "segments": ["a."]},
    {"id": "x", "segments": ["b."]}
  ])";
  CHECK_THROWS_WITH_AS(dataio::parse_captions(duplicate),
                       doctest::Contains("x"), std::runtime_error);

  const char* empty_segments = R"([{"id": "y", "segments": []}])";
  CHECK_THROWS_WITH_AS(dataio::parse_captions(empty_segments),
                       doctest::Contains("y"), std::runtime_error);

  const char* empty_string = R"([{"id": "z", "segments": ["ok.", ""]}])";
  CHECK_THROWS_WITH_AS(dataio::parse_captions(empty_string),
                       doctest::Contains("z"), std::runtime_error);

  CHECK_THROWS(dataio::parse_captions("{not json"));
  CHECK_THROWS(dataio::parse_captions(R"({"id": "a"})"));
}

TEST_CASE("load_captions fails cleanly on a missing file") {
  CHECK_THROWS(dataio::load_captions("/nonexistent/captions.json"));
}

TEST_CASE("round_sig keeps 6 significant digits") {
  CHECK(dataio::round_sig(0.123456789) == 0.123457);
  CHECK(dataio::round_sig(123456.789) == 123457.0);
  CHECK(dataio::round_sig(-1.0000004) == -1.0);
  CHECK(dataio::round_sig(0.0) == 0.0);
  CHECK(dataio::round_sig(1e-9) == 1e-9);
}

TEST_CASE("report JSON is byte-stable and round-trips") {
  HiMoReport report;
  report.k = 3;
  report.per_sample = {{"s1", {0.1234567, 0.25, 0.5}}, {"s2", {0.3, 0.2, 0.7}}};
  report.per_sample_pearson = {{0.981234567, false}, {0.5, false}};
  report.himo_k_mean = 0.7406172835;
  report.himo_shallow = 50.0;
  report.degenerate_count = 0;
  report.recall_at = {{1, 50.0}, {5, 100.0}};
  report.ssi = 12.3456789;

  const auto text = dataio::report_to_json(report);
  CHECK(text == dataio::report_to_json(report));  // byte stability

  const auto back = dataio::report_from_json(text);
  CHECK(back.k == 3);
  REQUIRE(back.per_sample.size() == 2);
  CHECK(back.per_sample[0].sample_id == "s1");
  CHECK(back.per_sample[0].scores[0] == dataio::round_sig(0.1234567));
  CHECK(back.himo_k_mean.has_value());
  CHECK(*back.himo_k_mean == dataio::round_sig(0.7406172835));
  CHECK(back.recall_at.at(5) == 100.0);
  CHECK(back.ssi.has_value());

  // Round-tripping the rounded report is a fixed point.
  CHECK(dataio::report_to_json(back) == text);
}

TEST_CASE("write_report emits both formats") {
  HiMoReport report;
  report.k = 2;
  report.per_sample = {{"a", {0.5, 0.75}}};
  report.per_sample_pearson = {{1.0, false}};
  report.himo_k_mean = 1.0;

  const auto dir = std::filesystem::temp_directory_path();
  const auto json_path = (dir / "himo_report_test.json").string();
  const auto csv_path = (dir / "himo_report_test.csv").string();
  dataio::write_report(report, json_path, dataio::ReportFormat::kJson);
  dataio::write_report(report, csv_path, dataio::ReportFormat::kCsv);

  std::ifstream json_in(json_path);
  std::string json_text((std::istreambuf_iterator<char>(json_in)),
                        std::istreambuf_iterator<char>());
  CHECK(json_text == dataio::report_to_json(report));

  std::ifstream csv_in(csv_path);
  std::string header;
  std::getline(csv_in, header);
  CHECK(header == "sample_id,k,score,pearson");
  std::string line;
  std::getline(csv_in, line);
  CHECK(line == "a,1,0.5,1");
  std::getline(csv_in, line);
  CHECK(line == "a,2,0.75,1");

  std::filesystem::remove(json_path);
  std::filesystem::remove(csv_path);
}
