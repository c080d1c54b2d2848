#include "vsynopsis/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "vsynopsis/error.hpp"

namespace vsyn {
namespace {

using nlohmann::json;

struct Numbered {
  Detection det;
  std::size_t line;
  bool has_time;
};

void check_fps(double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ValidationError("fps", "must be > 0");
}

void check_record(const Detection& d, std::size_t line) {
  auto bad = [line](const std::string& what) { throw FormatError(what, line); };
  if (d.frame_index < 0) bad("frame index must be nonnegative");
  if (!std::isfinite(d.timestamp_s) || d.timestamp_s < 0.0) bad("timestamp must be a nonnegative number");
  if (!std::isfinite(d.cx_px) || !std::isfinite(d.cy_px)) bad("center must be finite");
  if (!(d.w_px > 0.0) || !std::isfinite(d.w_px)) bad("width must be > 0");
  if (!(d.h_px > 0.0) || !std::isfinite(d.h_px)) bad("height must be > 0");
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) bad("confidence must lie in [0, 1]");
  if (d.class_label.empty()) bad("class label must be nonempty");
}

// Sorts, fills in missing timestamps, and enforces the cross-record invariants.
TrackLog finish(std::vector<Numbered> recs, double fps, std::string camera_id) {
  for (auto& r : recs) {
    if (!r.has_time) r.det.timestamp_s = static_cast<double>(r.det.frame_index) / fps;
    check_record(r.det, r.line);
  }

  std::map<TrackId, std::pair<std::string, std::size_t>> labels;
  for (const auto& r : recs) {
    auto [it, inserted] = labels.try_emplace(r.det.track_id, r.det.class_label, r.line);
    if (!inserted && it->second.first != r.det.class_label) {
      throw ConsistencyError("line " + std::to_string(r.line) + ": track " +
                             std::to_string(r.det.track_id) + " changes class from '" +
                             it->second.first + "' (line " + std::to_string(it->second.second) +
                             ") to '" + r.det.class_label + "'");
    }
  }

  std::stable_sort(recs.begin(), recs.end(), [](const Numbered& a, const Numbered& b) {
    if (a.det.frame_index != b.det.frame_index) return a.det.frame_index < b.det.frame_index;
    return a.det.track_id < b.det.track_id;
  });

  TrackLog log{std::move(camera_id), fps, {}};
  log.detections.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (i > 0) {
      const auto& p = recs[i - 1];
      const auto& c = recs[i];
      if (p.det.frame_index == c.det.frame_index) {
        if (p.det.track_id == c.det.track_id)
          throw FormatError("duplicate detection of track " + std::to_string(c.det.track_id) +
                                " in frame " + std::to_string(c.det.frame_index),
                            c.line);
        if (p.det.timestamp_s != c.det.timestamp_s)
          throw OrderingError("line " + std::to_string(c.line) + ": frame " +
                              std::to_string(c.det.frame_index) + " carries two timestamps");
      } else if (c.det.timestamp_s < p.det.timestamp_s) {
        throw OrderingError("line " + std::to_string(c.line) + ": timestamp decreases at frame " +
                            std::to_string(c.det.frame_index));
      }
    }
    log.detections.push_back(std::move(recs[i].det));
  }
  return log;
}

template <typename T>
T field(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) throw FormatError(std::string("missing field \"") + key + "\"", line);
  bool ok = false;
  if constexpr (std::is_same_v<T, std::int64_t>) {
    ok = it->is_number_integer() &&
         !(it->is_number_unsigned() && it->template get<std::uint64_t>() > INT64_MAX);
  } else if constexpr (std::is_same_v<T, double>) {
    ok = it->is_number();
  } else {
    ok = it->is_string();
  }
  if (!ok) throw FormatError(std::string("field \"") + key + "\" has the wrong type", line);
  return it->template get<T>();
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t' && ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double to_real(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + s + "'", line);
  }
}

std::int64_t to_int(const std::string& s, std::size_t line) {
  double v = to_real(s, line);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw FormatError("not an integer: '" + s + "'", line);
  return static_cast<std::int64_t>(v);
}

}  // namespace

double TrackLog::duration_s() const {
  if (detections.empty()) return 0.0;
  double last = 0.0;
  for (const auto& d : detections) last = std::max(last, d.timestamp_s);
  return last + 1.0 / fps;
}

TrackLog parse_track_log(std::istream& in, double fps, std::string camera_id) {
  check_fps(fps);
  std::vector<Numbered> recs;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("malformed record: ") + e.what(), n);
    }
    if (!rec.is_object()) throw FormatError("record must be a JSON object", n);
    Numbered r{{}, n, false};
    r.det.frame_index = field<std::int64_t>(rec, "f", n);
    r.det.track_id = field<std::int64_t>(rec, "id", n);
    r.det.class_label = field<std::string>(rec, "cls", n);
    r.det.cx_px = field<double>(rec, "x", n);
    r.det.cy_px = field<double>(rec, "y", n);
    r.det.w_px = field<double>(rec, "w", n);
    r.det.h_px = field<double>(rec, "h", n);
    r.det.confidence = field<double>(rec, "p", n);
    if (auto t = rec.find("t"); t != rec.end() && !t->is_null()) {
      r.det.timestamp_s = field<double>(rec, "t", n);
      r.has_time = true;
    }
    recs.push_back(std::move(r));
  }
  return finish(std::move(recs), fps, std::move(camera_id));
}

TrackLog parse_mot_csv(std::istream& in, double fps, std::string camera_id) {
  check_fps(fps);
  std::vector<Numbered> recs;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto cols = split_csv(line);
    if (cols.size() < 8) throw FormatError("expected at least 8 columns", n);
    Numbered r{{}, n, false};
    r.det.frame_index = to_int(cols[0], n);
    r.det.track_id = to_int(cols[1], n);
    double left = to_real(cols[2], n);
    double top = to_real(cols[3], n);
    r.det.w_px = to_real(cols[4], n);
    r.det.h_px = to_real(cols[5], n);
    r.det.confidence = to_real(cols[6], n);
    r.det.class_label = cols[7];
    r.det.cx_px = left + r.det.w_px / 2.0;
    r.det.cy_px = top + r.det.h_px / 2.0;
    recs.push_back(std::move(r));
  }
  return finish(std::move(recs), fps, std::move(camera_id));
}

TrackLog read_track_log(const std::filesystem::path& path, double fps, LogFormat format,
                        std::string camera_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open track log: " + path.string());
  return format == LogFormat::Jsonl ? parse_track_log(in, fps, std::move(camera_id))
                                    : parse_mot_csv(in, fps, std::move(camera_id));
}

void write_track_log(std::ostream& out, const TrackLog& log) {
  for (const auto& d : log.detections) {
    nlohmann::ordered_json rec;
    rec["f"] = d.frame_index;
    rec["t"] = d.timestamp_s;
    rec["id"] = d.track_id;
    rec["cls"] = d.class_label;
    rec["x"] = d.cx_px;
    rec["y"] = d.cy_px;
    rec["w"] = d.w_px;
    rec["h"] = d.h_px;
    rec["p"] = d.confidence;
    out << rec.dump() << '\n';
  }
}

TrackLog filter_by_confidence(const TrackLog& log, double yolo_threshold) {
  TrackLog out{log.camera_id, log.fps, {}};
  out.detections.reserve(log.detections.size());
  std::copy_if(log.detections.begin(), log.detections.end(), std::back_inserter(out.detections),
               [yolo_threshold](const Detection& d) { return d.confidence >= yolo_threshold; });
  return out;
}

}  // namespace vsyn
