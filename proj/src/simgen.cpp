#include "vsynopsis/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "vsynopsis/error.hpp"

namespace vsyn::sim {
namespace {

using nlohmann::ordered_json;

// std::mt19937_64's sequence is fixed by the standard; the distributions are
// not, so the [0, 1) mapping is done here to keep logs identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t actor_seed(std::uint64_t seed, std::size_t actor, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(actor + 1) ^ splitmix64(~salt));
}

// Noise-free world position of an actor `k` frames after its entry.
struct Path {
  double x0;
  double step;
  double x_lo, x_hi;
  std::int64_t max_frames;  // -1: until the lane ends

  double x_at(std::int64_t k) const { return x0 + static_cast<double>(k) * step; }
  bool on_lane(std::int64_t k) const { return x_at(k) >= x_lo && x_at(k) <= x_hi; }
};

Path path_of(const Scenario& s, const ActorSpec& a) {
  const Lane& lane = s.lanes[a.lane];
  switch (a.motion) {
    case Motion::LaneFollow:
    case Motion::Dash: {
      const bool east = lane.direction > 0;
      return {east ? lane.x_min_px : lane.x_max_px, lane.direction * a.speed_px, lane.x_min_px, lane.x_max_px, -1};
    }
    case Motion::WrongWay: {
      const bool east = lane.direction > 0;
      return {east ? lane.x_max_px : lane.x_min_px, -lane.direction * a.speed_px, lane.x_min_px, lane.x_max_px, -1};
    }
    case Motion::Loiter: {
      const double x = lane.x_min_px + a.position * (lane.x_max_px - lane.x_min_px);
      return {x, 0.0, lane.x_min_px, lane.x_max_px, std::llround(a.dwell_s * s.fps)};
    }
  }
  return {};
}

std::int64_t frame_count(const Scenario& s) { return std::llround(s.duration_s * s.fps); }

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

}  // namespace

std::string_view to_string(Motion m) {
  switch (m) {
    case Motion::LaneFollow: return "lane_follow";
    case Motion::WrongWay: return "wrong_way";
    case Motion::Loiter: return "loiter";
    case Motion::Dash: return "dash";
  }
  return "lane_follow";
}

Motion motion_from_string(std::string_view s) {
  if (s == "lane_follow") return Motion::LaneFollow;
  if (s == "wrong_way") return Motion::WrongWay;
  if (s == "loiter") return Motion::Loiter;
  if (s == "dash") return Motion::Dash;
  throw ValidationError("motion", "unknown motion model '" + std::string(s) + "'");
}

void validate(const Scenario& s) {
  require(s.duration_s > 0.0 && std::isfinite(s.duration_s), "duration_s", "must be > 0");
  require(s.fps > 0.0 && std::isfinite(s.fps), "fps", "must be > 0");
  require(s.width_px > 0.0 && s.height_px > 0.0, "frame size", "must be positive");
  for (std::size_t i = 0; i < s.lanes.size(); ++i) {
    const auto& l = s.lanes[i];
    const std::string f = "lanes[" + std::to_string(i) + "]";
    require(l.x_min_px < l.x_max_px, f, "needs x_min_px < x_max_px");
    require(l.direction == 1 || l.direction == -1, f, "direction must be +1 or -1");
    require(l.y_px >= 0.0 && l.y_px <= s.height_px, f, "y_px outside the frame");
  }
  for (std::size_t i = 0; i < s.actors.size(); ++i) {
    const auto& a = s.actors[i];
    const std::string f = "actors[" + std::to_string(i) + "]";
    require(!a.class_label.empty(), f, "class_label must be nonempty");
    require(a.lane < s.lanes.size(), f, "lane index out of range");
    require(a.entry_s >= 0.0 && a.entry_s < s.duration_s, f, "entry_s must lie in [0, duration_s)");
    require(a.motion == Motion::Loiter || a.speed_px > 0.0, f, "speed_px must be > 0");
    require(a.jitter_px >= 0.0, f, "jitter_px must be >= 0");
    require(a.confidence_min >= 0.3 && a.confidence_min <= a.confidence_max && a.confidence_max <= 1.0, f,
            "confidence range must satisfy 0.3 <= min <= max <= 1");
    require(a.motion != Motion::Loiter || a.dwell_s > 0.0, f, "dwell_s must be > 0");
    require(a.position >= 0.0 && a.position <= 1.0, f, "position must lie in [0, 1]");
    require(a.w_px > 0.0 && a.h_px > 0.0, f, "box size must be positive");
  }
}

GeneratedLog generate(const Scenario& s) {
  return generate(s, s.views.empty() ? CameraView{} : s.views.front());
}

GeneratedLog generate(const Scenario& s, const CameraView& view) {
  validate(s);
  GeneratedLog out;
  out.log.camera_id = view.camera_id;
  out.log.fps = s.fps;
  const std::int64_t frames = frame_count(s);
  const std::int64_t shift = std::llround(view.clock_offset_s * s.fps);

  for (std::size_t i = 0; i < s.actors.size(); ++i) {
    const ActorSpec& a = s.actors[i];
    const TrackId id = static_cast<TrackId>(i) + 1;
    out.ground_truth[id] = a.ground_truth_anomalous();
    const Path p = path_of(s, a);
    const double y = s.lanes[a.lane].y_px;
    Rng rng(actor_seed(s.rng_seed, i, view.jitter_salt));

    const std::int64_t f0 = std::llround(a.entry_s * s.fps);
    for (std::int64_t k = 0;; ++k) {
      if (p.max_frames >= 0 && k >= p.max_frames) break;
      const std::int64_t f = f0 + k;
      if (f >= frames) break;
      if (!p.on_lane(k)) break;
      const double x = p.x_at(k);

      // Draw every frame so a crop never changes the noise of what it sees.
      const double jx = rng.uniform(-a.jitter_px, a.jitter_px);
      const double jy = rng.uniform(-a.jitter_px, a.jitter_px);
      const double conf = rng.uniform(a.confidence_min, a.confidence_max);

      const double cam_x = x - view.x_offset_px;
      const std::int64_t cam_f = f + shift;
      if (cam_x < 0.0 || cam_x > s.width_px || cam_f < 0 || cam_f >= frames) continue;

      Detection d;
      d.frame_index = cam_f;
      d.timestamp_s = static_cast<double>(cam_f) / s.fps;
      d.track_id = id;
      d.class_label = a.class_label;
      d.cx_px = std::clamp(cam_x + jx, 0.0, s.width_px);
      d.cy_px = std::clamp(y + jy, 0.0, s.height_px);
      d.w_px = a.w_px;
      d.h_px = a.h_px;
      d.confidence = conf;
      out.log.detections.push_back(std::move(d));
    }
  }
  std::sort(out.log.detections.begin(), out.log.detections.end(), [](const Detection& a, const Detection& b) {
    return a.frame_index != b.frame_index ? a.frame_index < b.frame_index : a.track_id < b.track_id;
  });
  return out;
}

std::pair<double, double> on_screen_interval(const Scenario& s, std::size_t actor) {
  const ActorSpec& a = s.actors.at(actor);
  const Path p = path_of(s, a);
  std::int64_t n = 0;
  while ((p.max_frames < 0 || n < p.max_frames) && p.on_lane(n)) ++n;
  const std::int64_t f0 = std::llround(a.entry_s * s.fps);
  const std::int64_t f1 = std::min(f0 + n, frame_count(s)) - 1;
  return {static_cast<double>(f0) / s.fps, static_cast<double>(f1) / s.fps};
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["duration_s"] = s.duration_s;
  j["fps"] = s.fps;
  j["width_px"] = s.width_px;
  j["height_px"] = s.height_px;
  j["rng_seed"] = s.rng_seed;
  auto lanes = ordered_json::array();
  for (const auto& l : s.lanes) {
    lanes.push_back(ordered_json{{"name", l.name}, {"y_px", l.y_px}, {"x_min_px", l.x_min_px},
                                 {"x_max_px", l.x_max_px}, {"direction", l.direction}});
  }
  j["lanes"] = lanes;
  auto actors = ordered_json::array();
  for (const auto& a : s.actors) {
    ordered_json ja{{"class", a.class_label}, {"entry_s", a.entry_s}, {"motion", to_string(a.motion)},
                    {"lane", a.lane}, {"speed_px", a.speed_px}, {"jitter_px", a.jitter_px},
                    {"confidence", {a.confidence_min, a.confidence_max}}, {"size", {a.w_px, a.h_px}}};
    if (a.motion == Motion::Loiter) {
      ja["dwell_s"] = a.dwell_s;
      ja["position"] = a.position;
    }
    actors.push_back(std::move(ja));
  }
  j["actors"] = actors;
  if (!s.views.empty()) {
    auto views = ordered_json::array();
    for (const auto& v : s.views) {
      views.push_back(ordered_json{{"camera_id", v.camera_id}, {"x_offset_px", v.x_offset_px},
                                   {"clock_offset_s", v.clock_offset_s}, {"jitter_salt", v.jitter_salt}});
    }
    j["views"] = views;
  }
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  Scenario s;
  try {
    const auto j = nlohmann::json::parse(text.begin(), text.end());
    s.duration_s = j.at("duration_s").get<double>();
    s.fps = j.value("fps", s.fps);
    s.width_px = j.value("width_px", s.width_px);
    s.height_px = j.value("height_px", s.height_px);
    s.rng_seed = j.value("rng_seed", s.rng_seed);
    for (const auto& jl : j.at("lanes")) {
      Lane l;
      l.name = jl.value("name", std::string{});
      l.y_px = jl.at("y_px").get<double>();
      l.x_min_px = jl.value("x_min_px", 0.0);
      l.x_max_px = jl.value("x_max_px", s.width_px);
      l.direction = jl.value("direction", 1);
      s.lanes.push_back(std::move(l));
    }
    for (const auto& ja : j.value("actors", nlohmann::json::array())) {
      ActorSpec a;
      a.class_label = ja.at("class").get<std::string>();
      a.entry_s = ja.at("entry_s").get<double>();
      a.motion = motion_from_string(ja.value("motion", std::string("lane_follow")));
      a.lane = ja.value("lane", std::size_t{0});
      a.speed_px = ja.value("speed_px", a.speed_px);
      a.jitter_px = ja.value("jitter_px", a.jitter_px);
      if (auto c = ja.find("confidence"); c != ja.end()) {
        a.confidence_min = c->at(0).get<double>();
        a.confidence_max = c->at(1).get<double>();
      }
      if (auto sz = ja.find("size"); sz != ja.end()) {
        a.w_px = sz->at(0).get<double>();
        a.h_px = sz->at(1).get<double>();
      }
      a.dwell_s = ja.value("dwell_s", a.dwell_s);
      a.position = ja.value("position", a.position);
      s.actors.push_back(std::move(a));
    }
    for (const auto& jv : j.value("views", nlohmann::json::array())) {
      CameraView v;
      v.camera_id = jv.value("camera_id", v.camera_id);
      v.x_offset_px = jv.value("x_offset_px", 0.0);
      v.clock_offset_s = jv.value("clock_offset_s", 0.0);
      v.jitter_salt = jv.value("jitter_salt", std::uint64_t{0});
      s.views.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad scenario: ") + e.what(), 0);
  }
  validate(s);
  return s;
}

std::string ground_truth_to_json(const std::map<TrackId, bool>& gt) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, anomalous] : gt) j[std::to_string(id)] = anomalous;
  return j.dump(2) + "\n";
}

Scenario traffic_scenario(const TrafficOptions& opt) {
  Scenario s;
  s.fps = 25.0;
  s.width_px = 1280.0;
  s.height_px = 720.0;
  s.rng_seed = opt.seed;
  const double w = s.width_px;
  // Bicycles are only visible on the right 30% of the frame; that is what
  // makes direction of travel linearly visible in (x, displacement).
  s.lanes = {{"road", 360.0, 0.0, w, 1}, {"bike_north", 260.0, 0.7 * w, w, -1}, {"bike_south", 460.0, 0.7 * w, w, -1}};

  Rng rng(splitmix64(opt.seed ^ 0x7a11c0ffeeULL));
  const double car_crossing_s = w / 5.0 / s.fps;
  const double tail_entry = 2.0 + opt.car_interval_s * opt.cars + 2.0;
  s.duration_s = tail_entry + car_crossing_s + 2.0;

  auto car = [&](double entry, Motion m, double speed) {
    ActorSpec a;
    a.class_label = "car";
    a.entry_s = entry;
    a.motion = m;
    a.lane = 0;
    a.speed_px = speed;
    a.jitter_px = opt.jitter_px;
    a.w_px = 80.0;
    a.h_px = 40.0;
    return a;
  };

  for (int i = 0; i < opt.cars; ++i)
    s.actors.push_back(car(2.0 + opt.car_interval_s * i + rng.uniform(-0.5, 0.5), Motion::LaneFollow,
                           rng.uniform(5.0, 7.0)));

  int j = 0;
  for (double t = 1.0; t < s.duration_s - 10.0; t += opt.bike_interval_s, ++j) {
    ActorSpec b;
    b.class_label = "bicycle";
    b.entry_s = t;
    b.lane = (j % 2 == 0) ? 1 : 2;
    b.speed_px = rng.uniform(4.5, 6.5);
    b.jitter_px = opt.jitter_px;
    b.w_px = 30.0;
    b.h_px = 40.0;
    s.actors.push_back(b);
  }

  // Extra anomalies start once the warm-up has had time to pass.
  const double lo = 60.0, hi = std::max(61.0, s.duration_s - 15.0);
  for (int i = 0; i < opt.wrong_way; ++i) s.actors.push_back(car(rng.uniform(lo, hi), Motion::WrongWay, rng.uniform(5.0, 7.0)));
  for (int i = 0; i < opt.faint_wrong_way; ++i) {
    ActorSpec a = car(rng.uniform(lo, hi), Motion::WrongWay, rng.uniform(5.0, 7.0));
    a.confidence_min = 0.3;
    a.confidence_max = 0.4999;
    s.actors.push_back(a);
  }
  for (int i = 0; i < opt.loiter; ++i) {
    ActorSpec a = car(rng.uniform(lo, hi), Motion::Loiter, 0.0);
    a.dwell_s = 8.0;
    a.position = rng.uniform(0.2, 0.95);
    s.actors.push_back(a);
  }
  for (int i = 0; i < opt.dash; ++i) s.actors.push_back(car(rng.uniform(lo, hi), Motion::Dash, 24.0));

  if (opt.trailing_wrong_way) s.actors.push_back(car(tail_entry, Motion::WrongWay, 6.0));
  return s;
}

Scenario with_stereo_views(Scenario s, double x_shift_px, double clock_offset_s) {
  s.views = {{"cam_a", 0.0, 0.0, 1}, {"cam_b", x_shift_px, clock_offset_s, 2}};
  return s;
}

Scenario preset_scenario(std::string_view name, std::uint64_t seed) {
  TrafficOptions opt;
  opt.seed = seed;
  if (name == "traffic") return traffic_scenario(opt);
  if (name == "stereo") return with_stereo_views(traffic_scenario(opt));
  if (name == "clean") {
    opt.trailing_wrong_way = false;
    return traffic_scenario(opt);
  }
  if (name == "trend") {
    opt.cars = 40;
    opt.trailing_wrong_way = false;
    opt.wrong_way = 2;
    opt.faint_wrong_way = 2;
    return traffic_scenario(opt);
  }
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"traffic", "clean", "stereo", "trend"}; }

}  // namespace vsyn::sim
