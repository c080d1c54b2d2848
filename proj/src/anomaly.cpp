#include "vsynopsis/anomaly.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <tuple>

#include <json.hpp>

namespace vsyn {
namespace {

bool by_track_then_time(const AnomalyEvent& a, const AnomalyEvent& b) {
  return std::tie(a.track_id, a.timestamp_s, a.frame_index, a.membership) <
         std::tie(b.track_id, b.timestamp_s, b.frame_index, b.membership);
}

}  // namespace

bool detect(double membership, bool ready, const SynopsisConfig& cfg) {
  return ready && membership < cfg.class_threshold;
}

std::vector<AnomalyEvent> prune_sparse_objects(const std::vector<AnomalyEvent>& events,
                                               const SynopsisConfig& cfg) {
  std::map<TrackId, std::int64_t> per_track;
  for (const auto& e : events) ++per_track[e.track_id];
  std::vector<AnomalyEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out), [&](const AnomalyEvent& e) {
    return per_track[e.track_id] >= cfg.na_threshold;
  });
  return out;
}

std::vector<AnomalyEvent> prune_isolated(const std::vector<AnomalyEvent>& events,
                                         const SynopsisConfig& cfg) {
  std::vector<AnomalyEvent> sorted = events;
  std::sort(sorted.begin(), sorted.end(), by_track_then_time);

  std::vector<AnomalyEvent> out;
  out.reserve(sorted.size());
  std::size_t run_begin = 0;
  auto close_run = [&](std::size_t run_end) {
    if (static_cast<std::int64_t>(run_end - run_begin) >= cfg.sa_threshold)
      out.insert(out.end(), sorted.begin() + static_cast<std::ptrdiff_t>(run_begin),
                 sorted.begin() + static_cast<std::ptrdiff_t>(run_end));
    run_begin = run_end;
  };
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size()) {
      close_run(i);
      break;
    }
    const auto& prev = sorted[i - 1];
    const auto& cur = sorted[i];
    if (cur.track_id != prev.track_id || cur.timestamp_s - prev.timestamp_s > cfg.gap_seconds + kTimeEpsilon)
      close_run(i);
  }
  return out;
}

void sort_by_time(std::vector<AnomalyEvent>& events) {
  std::sort(events.begin(), events.end(), [](const AnomalyEvent& a, const AnomalyEvent& b) {
    return std::tie(a.timestamp_s, a.track_id, a.frame_index) < std::tie(b.timestamp_s, b.track_id, b.frame_index);
  });
}

void write_events_jsonl(std::ostream& out, const std::vector<AnomalyEvent>& events) {
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["id"] = e.track_id;
    j["cls"] = e.class_label;
    j["t"] = e.timestamp_s;
    j["f"] = e.frame_index;
    j["m"] = e.membership;
    out << j.dump() << '\n';
  }
}

}  // namespace vsyn
