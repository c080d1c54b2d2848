#include "vsynopsis/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vsynopsis/error.hpp"

namespace vsyn {
namespace {

using nlohmann::json;

void require_fraction(const char* field, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(field, "must lie in [0, 1]");
}

void require_count(const char* field, std::int64_t v) {
  if (v < 1) throw ValidationError(field, "must be >= 1");
}

double get_real(const json& j, const char* field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
  return v;
}

std::int64_t get_count(const json& j, const char* field) {
  if (!j.is_number_integer()) throw ValidationError(field, "expected an integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    throw ValidationError(field, "out of range");
  return j.get<std::int64_t>();
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

void validate(const SynopsisConfig& c) {
  require_fraction("yolo_threshold", c.yolo_threshold);
  require_fraction("class_threshold", c.class_threshold);
  require_count("na_threshold", c.na_threshold);
  require_count("sa_threshold", c.sa_threshold);
  require_count("warmup_per_class", c.warmup_per_class);
  require_count("warmup_total", c.warmup_total);
  require_count("batch_size", c.batch_size);
  require_count("min_segment_events", c.min_segment_events);
  if (!(c.gap_seconds > 0.0) || !std::isfinite(c.gap_seconds))
    throw ValidationError("gap_seconds", "must be > 0");
  if (!(c.merge_seconds >= 0.0) || !std::isfinite(c.merge_seconds))
    throw ValidationError("merge_seconds", "must be >= 0");
  if (!std::isfinite(c.stereo_offset_seconds))
    throw ValidationError("stereo_offset_seconds", "must be finite");
  if (c.sa_threshold > c.na_threshold)
    throw ValidationError("sa_threshold", "must not exceed na_threshold");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate))
    throw ValidationError("learning_rate", "must be > 0");
  if (!(c.l2 >= 0.0) || !std::isfinite(c.l2)) throw ValidationError("l2", "must be >= 0");
}

SynopsisConfig parse_config(std::string_view text) {
  json doc;
  try {
    // Empty or whitespace-only input means "all defaults".
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      doc = json::object();
    } else {
      doc = json::parse(text.begin(), text.end());
    }
  } catch (const json::parse_error& e) {
    throw FormatError(e.what(), line_of(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw FormatError("config must be a JSON object", 1);

  SynopsisConfig c;
  for (const auto& [key, value] : doc.items()) {
    const char* k = key.c_str();
    if (key == "yolo_threshold") c.yolo_threshold = get_real(value, k);
    else if (key == "class_threshold") c.class_threshold = get_real(value, k);
    else if (key == "na_threshold") c.na_threshold = get_count(value, k);
    else if (key == "sa_threshold") c.sa_threshold = get_count(value, k);
    else if (key == "warmup_per_class") c.warmup_per_class = get_count(value, k);
    else if (key == "warmup_total") c.warmup_total = get_count(value, k);
    else if (key == "batch_size") c.batch_size = get_count(value, k);
    else if (key == "gap_seconds") c.gap_seconds = get_real(value, k);
    else if (key == "merge_seconds") c.merge_seconds = get_real(value, k);
    else if (key == "min_segment_events") c.min_segment_events = get_count(value, k);
    else if (key == "stereo_offset_seconds") c.stereo_offset_seconds = get_real(value, k);
    else if (key == "learning_rate") c.learning_rate = get_real(value, k);
    else if (key == "l2") c.l2 = get_real(value, k);
    else if (key == "rng_seed") {
      if (!value.is_number_unsigned()) throw ValidationError(k, "expected a nonnegative integer");
      c.rng_seed = value.get<std::uint64_t>();
    } else {
      throw ValidationError(key, "unknown key");
    }
  }
  validate(c);
  return c;
}

SynopsisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const SynopsisConfig& c) {
  json j = json::object();
  j["yolo_threshold"] = c.yolo_threshold;
  j["class_threshold"] = c.class_threshold;
  j["na_threshold"] = c.na_threshold;
  j["sa_threshold"] = c.sa_threshold;
  j["warmup_per_class"] = c.warmup_per_class;
  j["warmup_total"] = c.warmup_total;
  j["batch_size"] = c.batch_size;
  j["gap_seconds"] = c.gap_seconds;
  j["merge_seconds"] = c.merge_seconds;
  j["min_segment_events"] = c.min_segment_events;
  j["stereo_offset_seconds"] = c.stereo_offset_seconds;
  j["rng_seed"] = c.rng_seed;
  j["learning_rate"] = c.learning_rate;
  j["l2"] = c.l2;
  return j.dump(2) + "\n";
}

}  // namespace vsyn
