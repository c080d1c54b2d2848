#ifndef VSYNOPSIS_CONFIG_HPP
#define VSYNOPSIS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace vsyn {

/// Every tunable threshold of the engine. Immutable once loaded; share freely.
///
/// Defaults reproduce the most common experiment regime: detector gate 0.5,
/// anomaly gate 0.5, 5 anomalies per object, runs of 3, classifier warm-up of
/// 200 samples per class and 400 in total, mini-batches of 100.
struct SynopsisConfig {
  double yolo_threshold = 0.5;   ///< minimum detection confidence kept
  double class_threshold = 0.5;  ///< membership below this is anomalous
  std::int64_t na_threshold = 5;  ///< min anomalies per object
  std::int64_t sa_threshold = 3;  ///< min length of a run of adjacent anomalies
  std::int64_t warmup_per_class = 200;
  std::int64_t warmup_total = 400;
  std::int64_t batch_size = 100;
  double gap_seconds = 1.0;    ///< anomaly gap that opens a new section
  double merge_seconds = 3.0;  ///< segments closer than this are merged
  std::int64_t min_segment_events = 5;
  double stereo_offset_seconds = 0.0;  ///< camera-B clock minus camera-A clock
  std::uint64_t rng_seed = 0;
  double learning_rate = 0.01;
  double l2 = 1e-4;

  friend bool operator==(const SynopsisConfig&, const SynopsisConfig&) = default;
};

/// Time comparisons (gap, merge, overlap) treat differences below this as
/// equal, so timestamps computed as frame / fps still tie exactly at 1 s.
inline constexpr double kTimeEpsilon = 1e-9;

/// Throws ValidationError naming the first offending field.
void validate(const SynopsisConfig& cfg);

/// Parses a flat JSON object. Every key is optional, unknown keys are an
/// error. Throws FormatError (with line number) or ValidationError.
SynopsisConfig parse_config(std::string_view text);

/// Reads and parses a config file. Throws IoError when unreadable.
SynopsisConfig load_config(const std::filesystem::path& path);

/// Pretty JSON with every key present; parse_config() of it returns `cfg`.
std::string serialize_config(const SynopsisConfig& cfg);

}  // namespace vsyn

#endif  // VSYNOPSIS_CONFIG_HPP
