#ifndef VSYNOPSIS_ANOMALY_HPP
#define VSYNOPSIS_ANOMALY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vsynopsis/config.hpp"
#include "vsynopsis/ingest.hpp"

namespace vsyn {

/// One frame in which a ready classifier judged a track unlike its own class.
struct AnomalyEvent {
  TrackId track_id = 0;
  std::string class_label;
  double timestamp_s = 0.0;
  std::int64_t frame_index = 0;
  double membership = 0.0;

  friend bool operator==(const AnomalyEvent&, const AnomalyEvent&) = default;
};

/// True iff `ready` and membership < class_threshold (strict).
bool detect(double membership, bool ready, const SynopsisConfig& cfg);

/// Drops every track with fewer than na_threshold events. Input order is kept.
std::vector<AnomalyEvent> prune_sparse_objects(const std::vector<AnomalyEvent>& events,
                                               const SynopsisConfig& cfg);

/// Splits each track's events into runs whose consecutive gaps are at most
/// gap_seconds and deletes runs shorter than sa_threshold. Output is sorted by
/// (track_id, timestamp, frame_index) whatever the input order.
std::vector<AnomalyEvent> prune_isolated(const std::vector<AnomalyEvent>& events,
                                         const SynopsisConfig& cfg);

/// Canonical ordering used throughout: timestamp, then track, then frame.
void sort_by_time(std::vector<AnomalyEvent>& events);

/// One JSON object per line: {"id","cls","t","f","m"}.
void write_events_jsonl(std::ostream& out, const std::vector<AnomalyEvent>& events);

}  // namespace vsyn

#endif  // VSYNOPSIS_ANOMALY_HPP
