#ifndef VSYNOPSIS_INGEST_HPP
#define VSYNOPSIS_INGEST_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace vsyn {

using TrackId = std::int64_t;

/// One object observation in one frame. Coordinates are box centers in pixels.
struct Detection {
  std::int64_t frame_index = 0;
  double timestamp_s = 0.0;
  TrackId track_id = 0;
  std::string class_label;
  double cx_px = 0.0;
  double cy_px = 0.0;
  double w_px = 1.0;
  double h_px = 1.0;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Detections of one camera, sorted by (frame_index, track_id).
struct TrackLog {
  std::string camera_id;
  double fps = 25.0;
  std::vector<Detection> detections;

  /// Last timestamp plus one frame period; 0 for an empty log.
  double duration_s() const;

  friend bool operator==(const TrackLog&, const TrackLog&) = default;
};

enum class LogFormat { Jsonl, MotCsv };

/// Parses the canonical JSONL schema, one detection per line:
///   {"f": int, "t": float?, "id": int, "cls": str,
///    "x": float, "y": float, "w": float, "h": float, "p": float}
/// Blank lines are skipped, unknown fields ignored. A missing "t" becomes f / fps.
///
/// Throws FormatError carrying the 1-based line number of a malformed or
/// out-of-range record, ConsistencyError when a track changes class, and
/// OrderingError when timestamps decrease with frame index.
TrackLog parse_track_log(std::istream& in, double fps, std::string camera_id = "cam0");

/// MOT-challenge style CSV: frame,id,x,y,w,h,conf,class with top-left boxes.
/// Extra trailing columns are ignored. Same validation as the JSONL parser.
TrackLog parse_mot_csv(std::istream& in, double fps, std::string camera_id = "cam0");

TrackLog read_track_log(const std::filesystem::path& path, double fps, LogFormat format,
                        std::string camera_id = "cam0");

/// Canonical JSONL with explicit timestamps. parse_track_log() of the output
/// reproduces `log` exactly.
void write_track_log(std::ostream& out, const TrackLog& log);

/// Keeps detections with confidence >= yolo_threshold, in order.
TrackLog filter_by_confidence(const TrackLog& log, double yolo_threshold);

}  // namespace vsyn

#endif  // VSYNOPSIS_INGEST_HPP
