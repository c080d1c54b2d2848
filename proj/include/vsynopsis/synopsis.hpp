#ifndef VSYNOPSIS_SYNOPSIS_HPP
#define VSYNOPSIS_SYNOPSIS_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsynopsis/anomaly.hpp"
#include "vsynopsis/classifier.hpp"
#include "vsynopsis/config.hpp"
#include "vsynopsis/features.hpp"
#include "vsynopsis/ingest.hpp"
#include "vsynopsis/segments.hpp"

namespace vsyn {

/// What the analyzer concluded about one detection.
struct Verdict {
  Vector5<double> features;
  Vector5<double> normalized;
  bool ready = false;
  double membership = 1.0;  ///< only meaningful when ready
  bool anomalous = false;
};

/// Per-camera online state: track histories, the shared normalizer and the
/// classifier. Every detection trains the classifier, anomalous or not; the
/// membership query happens after training and only once the warm-up gates
/// for the detection's class are open.
///
/// Not thread-safe; one instance per camera pipeline.
class CameraAnalyzer {
 public:
  explicit CameraAnalyzer(SynopsisConfig cfg);

  /// Detections must arrive in (frame, track) order.
  Verdict observe(const Detection& d);

  const std::vector<AnomalyEvent>& events() const { return events_; }
  const OnlineClassifier& classifier() const { return classifier_; }
  const RunningNormalizer& normalizer() const { return normalizer_; }
  const std::map<TrackId, TrackHistory>& histories() const { return histories_; }

  /// Timestamp at which each class's gates first passed (after training on the
  /// detection seen at that instant).
  const std::map<std::string, double>& gate_open_times() const { return gate_open_; }

 private:
  SynopsisConfig cfg_;
  std::map<TrackId, TrackHistory> histories_;
  RunningNormalizer normalizer_;
  OnlineClassifier classifier_;
  std::vector<AnomalyEvent> events_;
  std::map<std::string, double> gate_open_;
};

/// One sidecar line: a frame inside the cut list and the tracks flagged in it.
struct AnnotationFrame {
  std::int64_t frame_index = 0;
  double timestamp_s = 0.0;
  std::vector<TrackId> anomalous_track_ids;

  friend bool operator==(const AnnotationFrame&, const AnnotationFrame&) = default;
};

/// Replaces a burned-in overlay: which original time each kept frame shows and
/// which objects to mark there.
struct AnnotationSidecar {
  std::vector<AnnotationFrame> frames;

  friend bool operator==(const AnnotationSidecar&, const AnnotationSidecar&) = default;
};

struct SingleResult {
  CutList cut;
  AnnotationSidecar sidecar;
  SummaryReport report;
  std::vector<AnomalyEvent> raw_events;  ///< every per-frame verdict below threshold
  std::vector<AnomalyEvent> events;      ///< survivors of both prunes
  std::map<std::string, double> gate_open_times;
};

/// Full single-camera pipeline: confidence gate, online analysis, end-of-stream
/// pruning, segments, sidecar and report. Deterministic. `video_duration_s`
/// defaults to log.duration_s().
SingleResult run_single(const TrackLog& log, const SynopsisConfig& cfg,
                        std::optional<double> video_duration_s = std::nullopt);

struct StereoResult {
  SingleResult camera_a;
  SingleResult camera_b;
  CutList cut;  ///< intersection, on camera A's clock
  SummaryReport report;
};

/// Runs both cameras independently (concurrently, no shared state) and keeps
/// only the time both flagged.
StereoResult run_stereo(const TrackLog& log_a, const TrackLog& log_b, const SynopsisConfig& cfg);

/// Builds the sidecar for `cut` from the surviving events and the log's frames.
AnnotationSidecar make_sidecar(const CutList& cut, const std::vector<AnomalyEvent>& events,
                               const TrackLog& log);

void write_sidecar_jsonl(std::ostream& out, const AnnotationSidecar& sidecar);

/// External-cutter plan. Nothing here executes; see the CLI for that.
struct ClipStep {
  std::string input;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string output;
  std::string command;
};

struct RenderPlan {
  std::vector<ClipStep> clips;
  std::string concat_list_file;
  std::string concat_list;  ///< contents of the concat list file
  std::string concat_output;
  std::string concat_command;  ///< empty when there are no clips

  bool empty() const { return clips.empty(); }
};

inline constexpr const char* kDefaultCutTemplate = "ffmpeg -y -ss {ss} -to {to} -i {in} -c copy {out}";
inline constexpr const char* kDefaultConcatTemplate = "ffmpeg -y -f concat -safe 0 -i {list} -c copy {out}";

/// One cut command per segment (placeholders {in} {ss} {to} {out}) and one
/// concat step (placeholders {list} {out}). Output names are relative to
/// `output_dir` when it is nonempty.
RenderPlan plan_render(const CutList& cut, const std::string& video_path, const std::string& cut_template,
                       const std::string& concat_template = kDefaultConcatTemplate,
                       const std::string& output_dir = "");

/// Seconds as the shortest round-trip decimal, always with a fractional part
/// ("10.0", "16.1").
std::string format_seconds(double s);

std::string render_plan_to_json(const RenderPlan& plan);

}  // namespace vsyn

#endif  // VSYNOPSIS_SYNOPSIS_HPP
