#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vsynopsis/config.hpp"
#include "vsynopsis/error.hpp"
#include "vsynopsis/ingest.hpp"
#include "vsynopsis/segments.hpp"
#include "vsynopsis/simgen.hpp"
#include "vsynopsis/synopsis.hpp"

namespace fs = std::filesystem;
using namespace vsyn;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << content) || !out.flush()) throw IoError("cannot write " + p.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

SynopsisConfig config_from(const std::string& path) { return path.empty() ? SynopsisConfig{} : load_config(path); }

LogFormat format_from(const std::string& name) { return name == "mot" ? LogFormat::MotCsv : LogFormat::Jsonl; }

std::string events_jsonl(const std::vector<AnomalyEvent>& events) {
  std::ostringstream ss;
  write_events_jsonl(ss, events);
  return ss.str();
}

std::string sidecar_jsonl(const AnnotationSidecar& s) {
  std::ostringstream ss;
  write_sidecar_jsonl(ss, s);
  return ss.str();
}

std::string log_jsonl(const TrackLog& log) {
  std::ostringstream ss;
  write_track_log(ss, log);
  return ss.str();
}

struct SummarizeArgs {
  std::string log, config, out = ".", format = "jsonl", camera_id = "cam0";
  double fps = 25.0;
  std::optional<double> duration;
};

int summarize(const SummarizeArgs& a) {
  const SynopsisConfig cfg = config_from(a.config);
  const TrackLog log = read_track_log(a.log, a.fps, format_from(a.format), a.camera_id);
  const SingleResult r = run_single(log, cfg, a.duration);
  make_dir(a.out);
  const fs::path out(a.out);
  write_file(out / "cutlist.json", cut_list_to_json(r.cut));
  write_file(out / "events.jsonl", events_jsonl(r.events));
  write_file(out / "annotations.jsonl", sidecar_jsonl(r.sidecar));
  write_file(out / "report.json", report_to_json(r.report));
  std::cout << r.report.pieces << " pieces, " << format_minutes(r.report.total_summary_s) << " of "
            << format_minutes(r.report.video_duration_s) << '\n';
  return 0;
}

struct StereoArgs {
  std::string log_a, log_b, config, out = ".", format = "jsonl", camera_a = "cam_a", camera_b = "cam_b";
  double fps = 25.0;
  std::optional<double> offset;
};

int stereo(const StereoArgs& a) {
  SynopsisConfig cfg = config_from(a.config);
  if (a.offset) cfg.stereo_offset_seconds = *a.offset;
  validate(cfg);
  const TrackLog la = read_track_log(a.log_a, a.fps, format_from(a.format), a.camera_a);
  const TrackLog lb = read_track_log(a.log_b, a.fps, format_from(a.format), a.camera_b);
  const StereoResult r = run_stereo(la, lb, cfg);
  make_dir(a.out);
  const fs::path out(a.out);
  write_file(out / "cutlist.json", cut_list_to_json(r.cut));
  write_file(out / "report.json", report_to_json(r.report));
  write_file(out / "cutlist_a.json", cut_list_to_json(r.camera_a.cut));
  write_file(out / "cutlist_b.json", cut_list_to_json(r.camera_b.cut));
  std::cout << r.report.pieces << " pieces, " << format_minutes(r.report.total_summary_s) << " of "
            << format_minutes(r.report.video_duration_s) << '\n';
  return 0;
}

struct RenderArgs {
  std::string cutlist, video, templ, out = ".";
  bool execute = false;
};

int render(const RenderArgs& a) {
  const CutList cut = cut_list_from_json(read_file(a.cutlist));
  std::string cut_template = kDefaultCutTemplate;
  std::string concat_template = kDefaultConcatTemplate;
  if (!a.templ.empty()) {
    std::istringstream t(read_file(a.templ));
    std::string line;
    if (std::getline(t, line) && !line.empty()) cut_template = line;
    if (std::getline(t, line) && !line.empty()) concat_template = line;
  }
  for (const char* key : {"{ss}", "{to}", "{out}"}) {
    if (cut_template.find(key) == std::string::npos)
      throw ValidationError("template", std::string("cut template lacks ") + key);
  }

  const RenderPlan plan = plan_render(cut, a.video, cut_template, concat_template, a.out);
  make_dir(a.out);
  write_file(fs::path(a.out) / "render_plan.json", render_plan_to_json(plan));
  if (!plan.empty()) write_file(plan.concat_list_file, plan.concat_list);
  if (!a.execute) {
    for (const auto& c : plan.clips) std::cout << c.command << '\n';
    if (!plan.empty()) std::cout << plan.concat_command << '\n';
    return 0;
  }
  auto run = [](const std::string& cmd) {
    if (std::system(cmd.c_str()) != 0) throw IoError("command failed: " + cmd);
  };
  for (const auto& c : plan.clips) run(c.command);
  if (!plan.empty()) run(plan.concat_command);
  return 0;
}

int report_cmd(const std::string& cutlist) {
  std::cout << report_to_json(report(cut_list_from_json(read_file(cutlist))));
  return 0;
}

struct SimulateArgs {
  std::string scenario, preset, out = ".";
  std::optional<std::uint64_t> seed;
};

int simulate(const SimulateArgs& a) {
  if (a.scenario.empty() == a.preset.empty())
    throw ValidationError("simulate", "give exactly one of --scenario and --preset");
  sim::Scenario s = a.preset.empty() ? sim::scenario_from_json(read_file(a.scenario))
                                     : sim::preset_scenario(a.preset, a.seed.value_or(1));
  if (a.seed && a.preset.empty()) s.rng_seed = *a.seed;

  make_dir(a.out);
  const fs::path out(a.out);
  write_file(out / "scenario.json", sim::scenario_to_json(s));
  if (s.views.empty()) {
    const auto g = sim::generate(s);
    write_file(out / "log.jsonl", log_jsonl(g.log));
    write_file(out / "ground_truth.json", sim::ground_truth_to_json(g.ground_truth));
    return 0;
  }
  for (const auto& v : s.views) {
    const auto g = sim::generate(s, v);
    write_file(out / (v.camera_id + ".jsonl"), log_jsonl(g.log));
    write_file(out / "ground_truth.json", sim::ground_truth_to_json(g.ground_truth));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomaly-driven video synopsis from object-track logs"};
  app.require_subcommand(1);

  SummarizeArgs sa;
  auto* sum = app.add_subcommand("summarize", "Cut list, events, annotations and report for one camera");
  sum->add_option("--log", sa.log, "Track log")->required();
  sum->add_option("--config", sa.config, "JSON config (defaults when omitted)");
  sum->add_option("--out", sa.out, "Output directory");
  sum->add_option("--format", sa.format, "Log format")->check(CLI::IsMember({"jsonl", "mot"}));
  sum->add_option("--fps", sa.fps, "Frame rate for missing timestamps")->check(CLI::PositiveNumber);
  sum->add_option("--camera-id", sa.camera_id);
  sum->add_option("--duration", sa.duration, "Video duration in seconds (default: last frame + 1)");

  StereoArgs st;
  auto* ste = app.add_subcommand("stereo", "Intersect the cut lists of two cameras");
  ste->add_option("--log-a", st.log_a)->required();
  ste->add_option("--log-b", st.log_b)->required();
  ste->add_option("--offset", st.offset, "Camera-B clock minus camera-A clock, seconds");
  ste->add_option("--config", st.config);
  ste->add_option("--out", st.out);
  ste->add_option("--format", st.format)->check(CLI::IsMember({"jsonl", "mot"}));
  ste->add_option("--fps", st.fps)->check(CLI::PositiveNumber);
  ste->add_option("--camera-a", st.camera_a);
  ste->add_option("--camera-b", st.camera_b);

  RenderArgs ra;
  auto* ren = app.add_subcommand("render", "Plan (or run) the external cut and concat commands");
  ren->add_option("--cutlist", ra.cutlist)->required();
  ren->add_option("--video", ra.video)->required();
  ren->add_option("--template", ra.templ, "Line 1: cut command, line 2 (optional): concat command");
  ren->add_option("--out", ra.out);
  ren->add_flag("--execute", ra.execute, "Run the commands instead of printing them");

  std::string report_path;
  auto* rep = app.add_subcommand("report", "Print summary statistics of a cut list");
  rep->add_option("--cutlist", report_path)->required();

  SimulateArgs si;
  auto* simc = app.add_subcommand("simulate", "Write a synthetic track log with ground truth");
  simc->add_option("--scenario", si.scenario, "Scenario JSON");
  simc->add_option("--preset", si.preset)->check(CLI::IsMember(sim::preset_names()));
  simc->add_option("--seed", si.seed);
  simc->add_option("--out", si.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sum) return summarize(sa);
    if (*ste) return stereo(st);
    if (*ren) return render(ra);
    if (*rep) return report_cmd(report_path);
    if (*simc) return simulate(si);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
