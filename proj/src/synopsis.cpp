#include "vsynopsis/synopsis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <future>
#include <ostream>
#include <set>

#include <json.hpp>

namespace vsyn {

CameraAnalyzer::CameraAnalyzer(SynopsisConfig cfg)
    : cfg_(std::move(cfg)), classifier_(OnlineClassifier::from_config(cfg_)) {}

Verdict CameraAnalyzer::observe(const Detection& d) {
  auto [it, fresh] = histories_.try_emplace(d.track_id, d.track_id, d.class_label);
  TrackHistory& h = it->second;
  if (!fresh && h.class_label() != d.class_label)
    throw ConsistencyError("track " + std::to_string(d.track_id) + " changes class");
  update_history(h, d);

  Verdict v;
  v.features = make_feature_vector(h);
  v.normalized = normalizer_.normalize(v.features);
  classifier_.ingest_sample(v.normalized, d.class_label);

  v.ready = classifier_.is_ready(d.class_label, cfg_);
  if (v.ready) {
    gate_open_.try_emplace(d.class_label, d.timestamp_s);
    v.membership = classifier_.membership(v.normalized, d.class_label);
    v.anomalous = detect(v.membership, v.ready, cfg_);
    if (v.anomalous)
      events_.push_back({d.track_id, d.class_label, d.timestamp_s, d.frame_index, v.membership});
  }
  return v;
}

SingleResult run_single(const TrackLog& log, const SynopsisConfig& cfg, std::optional<double> video_duration_s) {
  validate(cfg);
  const double duration = video_duration_s.value_or(log.duration_s());
  const TrackLog kept = filter_by_confidence(log, cfg.yolo_threshold);

  CameraAnalyzer analyzer(cfg);
  for (const auto& d : kept.detections) analyzer.observe(d);

  SingleResult r;
  r.raw_events = analyzer.events();
  r.events = prune_isolated(prune_sparse_objects(r.raw_events, cfg), cfg);
  sort_by_time(r.events);
  r.cut = make_cut_list(r.events, cfg, duration, log.camera_id);
  r.sidecar = make_sidecar(r.cut, r.events, log);
  r.report = report(r.cut);
  r.gate_open_times = analyzer.gate_open_times();
  return r;
}

StereoResult run_stereo(const TrackLog& log_a, const TrackLog& log_b, const SynopsisConfig& cfg) {
  validate(cfg);
  auto fut_b = std::async(std::launch::async, [&] { return run_single(log_b, cfg); });
  StereoResult r;
  r.camera_a = run_single(log_a, cfg);
  r.camera_b = fut_b.get();
  r.cut = intersect_stereo(r.camera_a.cut, r.camera_b.cut, cfg);
  r.report = report(r.cut);
  return r;
}

AnnotationSidecar make_sidecar(const CutList& cut, const std::vector<AnomalyEvent>& events, const TrackLog& log) {
  AnnotationSidecar out;
  if (cut.segments.empty()) return out;

  std::map<std::int64_t, double> frame_time;
  for (const auto& d : log.detections) frame_time.emplace(d.frame_index, d.timestamp_s);
  std::map<std::int64_t, std::set<TrackId>> flagged;
  for (const auto& e : events) flagged[e.frame_index].insert(e.track_id);

  std::int64_t last = frame_time.empty() ? 0 : frame_time.rbegin()->first;
  last = std::max(last, static_cast<std::int64_t>(std::ceil(cut.video_duration_s * log.fps)) - 1);

  auto inside = [&](double t) {
    auto it = std::upper_bound(cut.segments.begin(), cut.segments.end(), t,
                               [](double x, const Segment& s) { return x < s.start_s; });
    return it != cut.segments.begin() && t <= std::prev(it)->end_s;
  };

  for (std::int64_t f = 0; f <= last; ++f) {
    auto ft = frame_time.find(f);
    const double t = ft != frame_time.end() ? ft->second : static_cast<double>(f) / log.fps;
    if (!inside(t)) continue;
    AnnotationFrame af{f, t, {}};
    if (auto fl = flagged.find(f); fl != flagged.end())
      af.anomalous_track_ids.assign(fl->second.begin(), fl->second.end());
    out.frames.push_back(std::move(af));
  }
  return out;
}

void write_sidecar_jsonl(std::ostream& out, const AnnotationSidecar& sidecar) {
  for (const auto& f : sidecar.frames) {
    nlohmann::ordered_json j;
    j["f"] = f.frame_index;
    j["t"] = f.timestamp_s;
    j["ids"] = f.anomalous_track_ids;
    out << j.dump() << '\n';
  }
}

std::string format_seconds(double s) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, s);
  std::string out(buf, end);
  if (std::isfinite(s) && out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

namespace {

void replace_all(std::string& s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
}

std::string join(const std::string& dir, const std::string& name) {
  return dir.empty() ? name : (std::filesystem::path(dir) / name).generic_string();
}

}  // namespace

RenderPlan plan_render(const CutList& cut, const std::string& video_path, const std::string& cut_template,
                       const std::string& concat_template, const std::string& output_dir) {
  RenderPlan plan;
  if (cut.segments.empty()) return plan;

  std::string ext = std::filesystem::path(video_path).extension().string();
  if (ext.empty()) ext = ".mp4";

  for (std::size_t i = 0; i < cut.segments.size(); ++i) {
    const Segment& s = cut.segments[i];
    char name[32];
    std::snprintf(name, sizeof name, "clip_%03zu", i);
    ClipStep step{video_path, s.start_s, s.end_s, join(output_dir, name + ext), cut_template};
    replace_all(step.command, "{in}", step.input);
    replace_all(step.command, "{ss}", format_seconds(s.start_s));
    replace_all(step.command, "{to}", format_seconds(s.end_s));
    replace_all(step.command, "{out}", step.output);
    plan.concat_list += "file '" + std::string(name) + ext + "'\n";
    plan.clips.push_back(std::move(step));
  }
  plan.concat_list_file = join(output_dir, "concat.txt");
  plan.concat_output = join(output_dir, "synopsis" + ext);
  plan.concat_command = concat_template;
  replace_all(plan.concat_command, "{list}", plan.concat_list_file);
  replace_all(plan.concat_command, "{out}", plan.concat_output);
  return plan;
}

std::string render_plan_to_json(const RenderPlan& plan) {
  nlohmann::ordered_json j;
  auto clips = nlohmann::ordered_json::array();
  for (const auto& c : plan.clips) {
    nlohmann::ordered_json jc;
    jc["input"] = c.input;
    jc["start_s"] = c.start_s;
    jc["end_s"] = c.end_s;
    jc["output"] = c.output;
    jc["command"] = c.command;
    clips.push_back(std::move(jc));
  }
  j["clips"] = std::move(clips);
  if (!plan.empty()) {
    j["concat"] = {{"list_file", plan.concat_list_file},
                   {"list", plan.concat_list},
                   {"output", plan.concat_output},
                   {"command", plan.concat_command}};
  } else {
    j["concat"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace vsyn
