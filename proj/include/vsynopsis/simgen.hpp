#ifndef VSYNOPSIS_SIMGEN_HPP
#define VSYNOPSIS_SIMGEN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vsynopsis/ingest.hpp"

namespace vsyn::sim {

/// Straight horizontal lane in world pixels. direction +1 travels toward
/// larger x. A lane may extend past the frame so cropped views still see it.
struct Lane {
  std::string name;
  double y_px = 360.0;
  double x_min_px = 0.0;
  double x_max_px = 1280.0;
  int direction = 1;
};

enum class Motion { LaneFollow, WrongWay, Loiter, Dash };

std::string_view to_string(Motion m);
Motion motion_from_string(std::string_view s);

struct ActorSpec {
  std::string class_label = "car";
  double entry_s = 0.0;
  Motion motion = Motion::LaneFollow;
  std::size_t lane = 0;
  double speed_px = 6.0;  ///< per frame; ignored by Loiter
  double jitter_px = 2.0;  ///< uniform +/- per axis per frame
  double confidence_min = 0.55;
  double confidence_max = 1.0;
  double dwell_s = 10.0;   ///< Loiter only
  double position = 0.5;   ///< Loiter only: fraction along the lane
  double w_px = 40.0;
  double h_px = 40.0;

  bool ground_truth_anomalous() const { return motion != Motion::LaneFollow; }
};

/// A crop of the world seen by one camera. clock_offset_s is this camera's
/// clock minus the world clock; frames that would fall before 0 are not recorded.
struct CameraView {
  std::string camera_id = "cam0";
  double x_offset_px = 0.0;
  double clock_offset_s = 0.0;
  std::uint64_t jitter_salt = 0;
};

struct Scenario {
  double duration_s = 60.0;
  double fps = 25.0;
  double width_px = 1280.0;
  double height_px = 720.0;
  std::uint64_t rng_seed = 0;
  std::vector<Lane> lanes;
  std::vector<ActorSpec> actors;
  std::vector<CameraView> views;  ///< empty means one full-frame view "cam0"
};

struct GeneratedLog {
  TrackLog log;
  std::map<TrackId, bool> ground_truth;  ///< track id -> anomalous
};

/// Throws ValidationError naming the offending field.
void validate(const Scenario& s);

/// Renders the scenario through one view. Track ids are actor index + 1.
/// Pure function of (scenario, view).
GeneratedLog generate(const Scenario& s, const CameraView& view);
GeneratedLog generate(const Scenario& s);

/// Earliest and latest world time at which the actor is on the lane.
std::pair<double, double> on_screen_interval(const Scenario& s, std::size_t actor);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(std::string_view text);
std::string ground_truth_to_json(const std::map<TrackId, bool>& gt);

/// Knobs of the built-in road scene: eastbound cars over the full width and
/// westbound bicycles that are only visible on the right part of the frame,
/// above and below the road.
struct TrafficOptions {
  std::uint64_t seed = 1;
  int cars = 60;
  double car_interval_s = 4.0;
  double bike_interval_s = 6.0;
  bool trailing_wrong_way = true;  ///< one wrong-way car after the last regular car
  int wrong_way = 0;               ///< extra wrong-way cars at random times
  int faint_wrong_way = 0;         ///< like wrong_way, detected with confidence in [0.3, 0.5)
  int loiter = 0;
  int dash = 0;
  double jitter_px = 2.0;
};

Scenario traffic_scenario(const TrafficOptions& opt);

/// Two crops of the same world: camera A full frame, camera B shifted right by
/// `x_shift_px` with its clock `clock_offset_s` ahead of A.
Scenario with_stereo_views(Scenario s, double x_shift_px = 120.0, double clock_offset_s = 0.0);

/// Named scenes shared by the CLI and the acceptance suite:
///   traffic  60 cars, then one wrong-way car
///   clean    the same without the wrong-way car
///   stereo   traffic seen through two overlapping crops
///   trend    40 cars, 2 wrong-way cars and 2 faintly detected wrong-way cars
/// Throws ValidationError for unknown names.
Scenario preset_scenario(std::string_view name, std::uint64_t seed);
std::vector<std::string> preset_names();

}  // namespace vsyn::sim

#endif  // VSYNOPSIS_SIMGEN_HPP
