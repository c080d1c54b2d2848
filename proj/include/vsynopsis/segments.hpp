#ifndef VSYNOPSIS_SEGMENTS_HPP
#define VSYNOPSIS_SEGMENTS_HPP

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsynopsis/anomaly.hpp"
#include "vsynopsis/config.hpp"

namespace vsyn {

/// Closed time interval of the original video, in seconds.
struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::int64_t event_count = 0;
  std::set<TrackId> source_tracks;

  double duration() const { return end_s - start_s; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Sorted, non-overlapping segments of one camera (or of a stereo pair).
struct CutList {
  std::vector<Segment> segments;
  double video_duration_s = 0.0;
  std::string camera_id;

  friend bool operator==(const CutList&, const CutList&) = default;
};

struct SummaryReport {
  double total_summary_s = 0.0;
  std::int64_t pieces = 0;
  double avg_piece_s = 0.0;
  double summary_rate_percent = 0.0;
  double video_duration_s = 0.0;

  friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

/// Shortest watchable piece; shorter segments are widened around their midpoint.
inline constexpr double kMinSegmentSeconds = 1.0;

/// Pools events across tracks, sorts them by time and opens a new segment
/// whenever two consecutive events are more than gap_seconds apart. Each
/// segment spans its first to last event.
std::vector<Segment> build_segments(const std::vector<AnomalyEvent>& events, const SynopsisConfig& cfg);

/// Keeps segments with at least min_segment_events events.
std::vector<Segment> drop_small_segments(const std::vector<Segment>& segs, const SynopsisConfig& cfg);

/// Widens segments shorter than `min_duration_s` symmetrically, clamped to
/// [0, video_duration_s].
std::vector<Segment> pad_segments(const std::vector<Segment>& segs, double min_duration_s,
                                  double video_duration_s);

/// Merges neighbours whose gap (next.start - prev.end) is below merge_seconds
/// until no such gap is left. Counts add up and track sets unite.
std::vector<Segment> merge_close(const std::vector<Segment>& segs, const SynopsisConfig& cfg);

/// build -> drop -> pad -> merge.
CutList make_cut_list(const std::vector<AnomalyEvent>& events, const SynopsisConfig& cfg,
                      double video_duration_s, std::string camera_id);

/// Intersects `a` with `b` after moving `b` onto a's clock (t_a = t_b - offset).
/// Only positive-length overlaps survive; an overlap's event_count is the
/// smaller parent count and its tracks are the union of both parents.
CutList intersect_stereo(const CutList& a, const CutList& b, double stereo_offset_seconds);

inline CutList intersect_stereo(const CutList& a, const CutList& b, const SynopsisConfig& cfg) {
  return intersect_stereo(a, b, cfg.stereo_offset_seconds);
}

SummaryReport report(const CutList& cut);

/// Throws ValidationError unless sorted, non-overlapping and inside the video.
void validate(const CutList& cut);

std::string cut_list_to_json(const CutList& cut);
CutList cut_list_from_json(std::string_view text);
std::string report_to_json(const SummaryReport& r);

/// m:ss, the way summary durations are usually tabulated.
std::string format_minutes(double seconds);

}  // namespace vsyn

#endif  // VSYNOPSIS_SEGMENTS_HPP
