#pragma once

#include <string>
#include <vector>

#include "himo/metrics.hpp"

namespace himo {

/// The canonical caption-segments format:
///   [{"id": "...", "segments": ["...", ...]}, ...]
/// Unique ids, every segments list non-empty, no empty segment strings.
struct CaptionFile {
  std::vector<SegmentedCaption> entries;
};

namespace dataio {

enum class ReportFormat { kJson, kCsv };

/// Parses and validates the caption-segments JSON. Rejections name the
/// offending id.
CaptionFile load_captions(const std::string& path);
CaptionFile parse_captions(const std::string& text);

void save_captions(const CaptionFile& file, const std::string& path);
std::string captions_to_json(const CaptionFile& file);

/// Bit-stable report serialization: sorted keys, floats rounded to
/// 6 significant digits. CSV columns: sample_id,k,score,pearson.
void write_report(const HiMoReport& report, const std::string& path,
                  ReportFormat format);
std::string report_to_json(const HiMoReport& report);
HiMoReport report_from_json(const std::string& text);

/// Rounds to 6 significant digits (the report float policy).
double round_sig(double value);

}  // namespace dataio

}  // namespace himo
