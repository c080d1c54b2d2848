#include "vsynopsis/segments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "vsynopsis/error.hpp"

namespace vsyn {

std::vector<Segment> build_segments(const std::vector<AnomalyEvent>& events, const SynopsisConfig& cfg) {
  std::vector<AnomalyEvent> pooled = events;
  sort_by_time(pooled);

  std::vector<Segment> segs;
  for (const auto& e : pooled) {
    if (segs.empty() || e.timestamp_s - segs.back().end_s > cfg.gap_seconds + kTimeEpsilon) {
      segs.push_back({e.timestamp_s, e.timestamp_s, 0, {}});
    }
    Segment& s = segs.back();
    s.end_s = e.timestamp_s;
    ++s.event_count;
    s.source_tracks.insert(e.track_id);
  }
  return segs;
}

std::vector<Segment> drop_small_segments(const std::vector<Segment>& segs, const SynopsisConfig& cfg) {
  std::vector<Segment> out;
  std::copy_if(segs.begin(), segs.end(), std::back_inserter(out),
               [&](const Segment& s) { return s.event_count >= cfg.min_segment_events; });
  return out;
}

std::vector<Segment> pad_segments(const std::vector<Segment>& segs, double min_duration_s,
                                  double video_duration_s) {
  std::vector<Segment> out = segs;
  for (auto& s : out) {
    if (s.duration() >= min_duration_s) continue;
    const double mid = 0.5 * (s.start_s + s.end_s);
    // The clamps never cut into the segment's own events.
    s.start_s = std::min(s.start_s, std::max(0.0, mid - 0.5 * min_duration_s));
    s.end_s = std::max(s.end_s, std::min(video_duration_s, mid + 0.5 * min_duration_s));
  }
  return out;
}

std::vector<Segment> merge_close(const std::vector<Segment>& segs, const SynopsisConfig& cfg) {
  std::vector<Segment> sorted = segs;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Segment& a, const Segment& b) { return a.start_s < b.start_s; });
  std::vector<Segment> out;
  for (auto& s : sorted) {
    if (!out.empty() && s.start_s - out.back().end_s < cfg.merge_seconds - kTimeEpsilon) {
      Segment& last = out.back();
      last.end_s = std::max(last.end_s, s.end_s);
      last.event_count += s.event_count;
      last.source_tracks.insert(s.source_tracks.begin(), s.source_tracks.end());
    } else {
      out.push_back(std::move(s));
    }
  }
  return out;
}

CutList make_cut_list(const std::vector<AnomalyEvent>& events, const SynopsisConfig& cfg,
                      double video_duration_s, std::string camera_id) {
  auto segs = build_segments(events, cfg);
  segs = drop_small_segments(segs, cfg);
  segs = pad_segments(segs, kMinSegmentSeconds, video_duration_s);
  segs = merge_close(segs, cfg);
  return {std::move(segs), video_duration_s, std::move(camera_id)};
}

CutList intersect_stereo(const CutList& a, const CutList& b, double offset) {
  CutList out;
  out.video_duration_s = a.video_duration_s;
  out.camera_id = a.camera_id == b.camera_id ? a.camera_id : a.camera_id + "+" + b.camera_id;

  std::size_t i = 0, j = 0;
  while (i < a.segments.size() && j < b.segments.size()) {
    const Segment& sa = a.segments[i];
    const Segment& sb = b.segments[j];
    const double b_start = sb.start_s - offset;
    const double b_end = sb.end_s - offset;
    const double lo = std::max(sa.start_s, b_start);
    const double hi = std::min(sa.end_s, b_end);
    if (hi - lo > kTimeEpsilon) {
      Segment s{lo, hi, std::min(sa.event_count, sb.event_count), sa.source_tracks};
      s.source_tracks.insert(sb.source_tracks.begin(), sb.source_tracks.end());
      out.segments.push_back(std::move(s));
    }
    if (sa.end_s < b_end) ++i;
    else ++j;
  }
  return out;
}

SummaryReport report(const CutList& cut) {
  SummaryReport r;
  r.video_duration_s = cut.video_duration_s;
  for (const auto& s : cut.segments) r.total_summary_s += s.duration();
  r.pieces = static_cast<std::int64_t>(cut.segments.size());
  r.avg_piece_s = r.pieces > 0 ? r.total_summary_s / static_cast<double>(r.pieces) : 0.0;
  r.summary_rate_percent = cut.video_duration_s > 0.0 ? 100.0 * r.total_summary_s / cut.video_duration_s : 0.0;
  return r;
}

void validate(const CutList& cut) {
  if (!(cut.video_duration_s >= 0.0) || !std::isfinite(cut.video_duration_s))
    throw ValidationError("video_duration_s", "must be a nonnegative number");
  for (std::size_t i = 0; i < cut.segments.size(); ++i) {
    const auto& s = cut.segments[i];
    const std::string where = "segments[" + std::to_string(i) + "]";
    if (!std::isfinite(s.start_s) || !std::isfinite(s.end_s) || s.start_s < 0.0 || s.end_s < s.start_s)
      throw ValidationError(where, "needs 0 <= start_s <= end_s");
    if (s.end_s > cut.video_duration_s) throw ValidationError(where, "ends after the video");
    if (s.event_count < 1) throw ValidationError(where, "event_count must be >= 1");
    if (i > 0 && s.start_s < cut.segments[i - 1].end_s)
      throw ValidationError(where, "overlaps or precedes the previous segment");
  }
}

std::string cut_list_to_json(const CutList& cut) {
  nlohmann::ordered_json j;
  j["camera_id"] = cut.camera_id;
  j["video_duration_s"] = cut.video_duration_s;
  auto segs = nlohmann::ordered_json::array();
  for (const auto& s : cut.segments) {
    nlohmann::ordered_json js;
    js["start_s"] = s.start_s;
    js["end_s"] = s.end_s;
    js["event_count"] = s.event_count;
    js["tracks"] = std::vector<TrackId>(s.source_tracks.begin(), s.source_tracks.end());
    segs.push_back(std::move(js));
  }
  j["segments"] = std::move(segs);
  return j.dump(2) + "\n";
}

CutList cut_list_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    throw FormatError(e.what(), 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n')));
  }
  CutList cut;
  try {
    cut.camera_id = j.value("camera_id", std::string{});
    cut.video_duration_s = j.at("video_duration_s").get<double>();
    for (const auto& js : j.at("segments")) {
      Segment s;
      s.start_s = js.at("start_s").get<double>();
      s.end_s = js.at("end_s").get<double>();
      s.event_count = js.value("event_count", std::int64_t{1});
      if (auto t = js.find("tracks"); t != js.end()) {
        for (const auto& id : *t) s.source_tracks.insert(id.get<TrackId>());
      }
      cut.segments.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad cut list: ") + e.what(), 0);
  }
  validate(cut);
  return cut;
}

std::string report_to_json(const SummaryReport& r) {
  nlohmann::ordered_json j;
  j["total_summary_s"] = r.total_summary_s;
  j["total_summary_min"] = format_minutes(r.total_summary_s);
  j["pieces"] = r.pieces;
  j["avg_piece_s"] = r.avg_piece_s;
  j["summary_rate_percent"] = r.summary_rate_percent;
  j["video_duration_s"] = r.video_duration_s;
  return j.dump(2) + "\n";
}

std::string format_minutes(double seconds) {
  const auto total = static_cast<long long>(std::llround(std::max(0.0, seconds)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld:%02lld", total / 60, total % 60);
  return buf;
}

}  // namespace vsyn
