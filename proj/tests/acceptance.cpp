// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/classifier_checks.hpp"
#include "oracles/interval_oracle.hpp"
#include "oracles/warmup_checks.hpp"
#include "vsynopsis/simgen.hpp"
#include "vsynopsis/synopsis.hpp"

using namespace vsyn;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and sizes.
constexpr double kWindowSlackS = 2.0;
constexpr double kMaxRuntimeS = 10.0;
constexpr double kCleanRateMaxPercent = 2.0;
constexpr int kTrendSeeds = 20;
constexpr int kStereoSeeds = 5;
constexpr int kWrongWaySeeds = 5;
constexpr double kTotalTieS = 1e-9;
constexpr double kGradRelTol = 1e-5;
constexpr double kGradAbsFloor = 1e-12;
constexpr int kGradStates = 100;
constexpr double kSimplexTol = 1e-9;
constexpr int kSeparableBatches = 50;
constexpr double kSeparableAccuracy = 0.95;
constexpr int kOracleInstances = 500;
constexpr int kWarmupMaxLen = 8;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome wrong_way() {
  std::ostringstream d;
  bool pass = true;
  double worst_runtime = 0.0;
  for (std::uint64_t seed = 1; seed <= kWrongWaySeeds; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = sim::preset_scenario("traffic", seed);
    const auto g = sim::generate(s);
    const auto r = run_single(g.log, SynopsisConfig{});
    const double runtime = seconds_since(t0);
    worst_runtime = std::max(worst_runtime, runtime);

    const std::size_t actor = s.actors.size() - 1;
    const TrackId id = static_cast<TrackId>(actor) + 1;
    const auto [on, off] = sim::on_screen_interval(s, actor);
    const bool gates_satisfiable = r.gate_open_times.count("car") && r.gate_open_times.at("car") < on;
    const bool cut = std::any_of(r.cut.segments.begin(), r.cut.segments.end(), [&](const Segment& x) {
      return x.end_s >= on - kWindowSlackS && x.start_s <= off + kWindowSlackS;
    });
    bool named = false;
    for (const auto& f : r.sidecar.frames)
      named = named || std::count(f.anomalous_track_ids.begin(), f.anomalous_track_ids.end(), id) > 0;
    const bool ok = g.ground_truth.at(id) && gates_satisfiable && cut && named && runtime < kMaxRuntimeS;
    pass = pass && ok;
    if (!ok) d << "seed " << seed << " failed (cut " << cut << ", named " << named << "); ";
  }
  d << kWrongWaySeeds << " seeds, track cut within +/-" << kWindowSlackS << " s and named in sidecar, worst runtime "
    << fmt("%.2f s", worst_runtime);
  return {pass, d.str()};
}

Outcome clean_scene() {
  bool pass = true;
  double worst_rate = 0.0, worst_runtime = 0.0;
  for (std::uint64_t seed = 1; seed <= kWrongWaySeeds; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = sim::generate(sim::preset_scenario("clean", seed));
    const auto r = run_single(g.log, SynopsisConfig{});
    const double runtime = seconds_since(t0);
    worst_rate = std::max(worst_rate, r.report.summary_rate_percent);
    worst_runtime = std::max(worst_runtime, runtime);
    pass = pass && r.report.summary_rate_percent <= kCleanRateMaxPercent && runtime < kMaxRuntimeS;
  }
  return {pass, std::to_string(kWrongWaySeeds) + " seeds, worst summary rate " + fmt("%.2f%%", worst_rate) +
                    " (limit " + fmt("%.0f%%", kCleanRateMaxPercent) + "), worst runtime " +
                    fmt("%.2f s", worst_runtime)};
}

Outcome trends() {
  int a_ok = 0, b_ok = 0, a_strict = 0, b_strict = 0;
  std::ostringstream bad;
  for (std::uint64_t seed = 1; seed <= kTrendSeeds; ++seed) {
    const auto log = sim::generate(sim::preset_scenario("trend", seed)).log;
    SynopsisConfig base;
    SynopsisConfig loose = base;
    loose.yolo_threshold = 0.3;
    SynopsisConfig strict = base;
    strict.na_threshold = 10;
    strict.sa_threshold = 6;
    const double t_base = run_single(log, base).report.total_summary_s;
    const double t_loose = run_single(log, loose).report.total_summary_s;
    const double t_strict = run_single(log, strict).report.total_summary_s;
    if (t_loose >= t_base - kTotalTieS) ++a_ok;
    else bad << "seed " << seed << " (a) " << t_loose << " < " << t_base << "; ";
    if (t_strict <= t_base + kTotalTieS) ++b_ok;
    else bad << "seed " << seed << " (b) " << t_strict << " > " << t_base << "; ";
    a_strict += t_loose > t_base + kTotalTieS;
    b_strict += t_strict < t_base - kTotalTieS;
  }
  std::ostringstream d;
  d << bad.str() << "(a) yolo 0.3 >= 0.5 on " << a_ok << "/" << kTrendSeeds << " (strictly on " << a_strict
    << "), (b) na/sa 10/6 <= 5/3 on " << b_ok << "/" << kTrendSeeds << " (strictly on " << b_strict << ")";
  return {a_ok == kTrendSeeds && b_ok == kTrendSeeds, d.str()};
}

Outcome stereo() {
  bool pass = true;
  std::ostringstream d;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= kStereoSeeds; ++seed) {
    const auto s = sim::preset_scenario("stereo", seed);
    const auto a = sim::generate(s, s.views[0]).log;
    const auto b = sim::generate(s, s.views[1]).log;
    const SynopsisConfig cfg;
    const auto both = run_stereo(a, b, cfg);
    const double lim = std::min(both.camera_a.report.total_summary_s, both.camera_b.report.total_summary_s);
    const bool contained = both.report.total_summary_s <= lim + kTotalTieS;
    if (lim > 0) worst_ratio = std::max(worst_ratio, both.report.total_summary_s / lim);

    const auto single = run_single(a, cfg);
    const auto self = run_stereo(a, a, cfg);
    const bool identical = self.cut == single.cut && self.report == single.report &&
                           cut_list_to_json(self.cut) == cut_list_to_json(single.cut);
    if (!contained || !identical) d << "seed " << seed << " contained " << contained << " self " << identical << "; ";
    pass = pass && contained && identical;
  }
  d << kStereoSeeds << " stereo scenes, stereo/min(single) total at most " << fmt("%.3f", worst_ratio)
    << ", self-intersection equals single exactly";
  return {pass, d.str()};
}

bool three_sig(double a, double b) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  const double unit = std::pow(10.0, std::floor(std::log10(scale)) - 2);
  return std::round(a / unit) == std::round(b / unit);
}

Outcome report_arithmetic() {
  // Table 2 row 1.1: 34 pieces, 3:29 total, 6.1 s average, 17.4% of the video.
  std::vector<Segment> pieces;
  for (int i = 0; i < 34; ++i) pieces.push_back({30.0 * i, 30.0 * i + 209.0 / 34.0, 5, {}});
  const auto r = report(CutList{pieces, 1200.0, "cam0"});
  const bool row = r.pieces == 34 && format_minutes(r.total_summary_s) == "3:29" &&
                   std::round(r.avg_piece_s * 10) == 61 && std::round(r.summary_rate_percent * 10) == 174;
  // Internal consistency of the row: 34 x 6.1 s lands within the rounding of the average.
  const bool consistent = std::abs(34 * 6.1 - 209.0) <= 34 * 0.05 + 1e-9;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Segment> s;
    double t = 0.0;
    const int n = i % 12;
    for (int k = 0; k < n; ++k) {
      t += u(rng);
      const double a = t;
      t += 1.0 + u(rng);
      s.push_back({a, t, 5, {}});
    }
    const CutList c{s, t + 1.0 + u(rng), "cam0"};
    const auto q = report(c);
    double total = 0.0;
    for (const auto& x : s) total += x.end_s - x.start_s;
    const bool ok = three_sig(q.total_summary_s, total) && q.pieces == n &&
                    three_sig(q.avg_piece_s, n ? total / n : 0.0) &&
                    three_sig(q.summary_rate_percent, 100.0 * total / c.video_duration_s);
    bad += !ok;
  }
  return {row && consistent && bad == 0,
          "row 1.1 reproduces 34 / 3:29 / " + fmt("%.1f s", r.avg_piece_s) + " / " +
              fmt("%.1f%%", r.summary_rate_percent) + "; 34 x 6.1 s = 207.4 s vs 209 s within avg rounding; " +
              std::to_string(1000 - bad) + "/1000 random cut lists satisfy avg = total/count, rate = 100 total/duration"};
}

Outcome classifier_numerics() {
  const auto g = oracle::gradient_check(kGradStates, 2024, kGradRelTol, kGradAbsFloor);
  const auto s = oracle::simplex_check(1000, 2025);
  const auto sep = oracle::separable_stream(kSeparableBatches, 2026);
  const bool pass = g.failures == 0 && g.states == kGradStates && s.failures == 0 &&
                    s.worst_sum_error <= kSimplexTol && sep.batches == kSeparableBatches &&
                    sep.accuracy >= kSeparableAccuracy;
  std::ostringstream d;
  d << g.states << " random states, " << g.entries - g.failures << "/" << g.entries
    << " gradient entries within 1e-5 rel + 1e-12 abs (worst rel above 1e-6 magnitude " << fmt("%.1e", g.worst_relative) << "); " << s.vectors
    << " probability vectors, worst |sum-1| " << fmt("%.1e", s.worst_sum_error) << "; separable stream "
    << fmt("%.1f%%", 100.0 * sep.accuracy) << " after " << sep.batches << " batches";
  return {pass, d.str()};
}

Outcome interval_oracle() {
  const auto r = oracle::random_instances(kOracleInstances, 31415);
  std::string d = std::to_string(r.instances - r.failures) + "/" + std::to_string(r.instances) +
                  " random instances match the 0.05 s timeline oracle within 1e-9";
  if (!r.first_failure.empty()) d += "; first failure: " + r.first_failure;
  return {r.failures == 0 && r.instances == kOracleInstances, d};
}

Outcome warmup() {
  const auto small = oracle::exhaustive_small(kWarmupMaxLen);
  const auto full = oracle::default_gates(6, 1200, 99);
  bool scene_ok = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = run_single(sim::generate(sim::preset_scenario("traffic", seed)).log, SynopsisConfig{});
    for (const auto& e : r.raw_events) scene_ok = scene_ok && e.timestamp_s >= r.gate_open_times.at(e.class_label);
  }
  std::ostringstream d;
  d << small.streams - small.failures << "/" << small.streams << " exhaustive small streams (len <= " << kWarmupMaxLen
    << ", gates 1-3/1-6), " << full.streams - full.failures << "/" << full.streams
    << " streams at 200/400 match the gate oracle exactly; traffic scenes " << (scene_ok ? "clean" : "VIOLATED");
  if (!small.first_failure.empty()) d << "; " << small.first_failure;
  if (!full.first_failure.empty()) d << "; " << full.first_failure;
  return {small.failures == 0 && full.failures == 0 && scene_ok, d.str()};
}

// Runs every CLI command twice into separate directories and compares bytes.
Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "vsyn_acceptance_cli";
  fs::remove_all(root);
  auto run = [&](const fs::path& dir, const std::string& args) {
    const std::string cmd = std::string(VSYN_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                            " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  auto pass_once = [&](const fs::path& dir) {
    fs::create_directories(dir);
    const std::string p = dir.string();
    std::vector<std::pair<std::string, std::string>> cmds = {
        {"sim_traffic", "simulate --preset traffic --seed 7 --out " + p + "/sim"},
        {"sim_stereo", "simulate --preset stereo --seed 7 --out " + p + "/st"},
        {"sim_trend", "simulate --preset trend --seed 7 --out " + p + "/trend"},
        {"summarize", "summarize --log " + p + "/sim/log.jsonl --out " + p + "/sum"},
        {"stereo", "stereo --log-a " + p + "/st/cam_a.jsonl --log-b " + p + "/st/cam_b.jsonl --offset 0 --out " + p +
                       "/stout"},
        {"report", "report --cutlist " + p + "/sum/cutlist.json"},
        {"render", "render --cutlist " + p + "/sum/cutlist.json --video in.mp4 --out " + p + "/render"},
    };
    bool ok = true;
    for (const auto& [name, args] : cmds) {
      ok = run(dir, args) && ok;
      fs::rename(dir / "stdout.txt", dir / (name + ".stdout"));
    }
    return ok;
  };
  const bool ran = pass_once(root / "a") && pass_once(root / "b");
  auto slurp = [](const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root / "a");
    std::string x = slurp(e.path()), y = slurp(root / "b" / rel);
    // Paths differ only by the run directory name.
    auto scrub = [](std::string s, const std::string& from) {
      for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos)) s.replace(pos, from.size(), "<run>");
      return s;
    };
    x = scrub(x, (root / "a").string());
    y = scrub(y, (root / "b").string());
    ++files;
    differ += x != y;
  }
  fs::remove_all(root);
  return {ran && files > 0 && differ == 0,
          std::to_string(files - differ) + "/" + std::to_string(files) +
              " output files byte-identical across two runs of simulate, summarize, stereo, report, render"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"wrong-way detection", wrong_way},
      {"clean-scene null result", clean_scene},
      {"threshold trends", trends},
      {"stereo containment", stereo},
      {"report arithmetic", report_arithmetic},
      {"classifier numerics", classifier_numerics},
      {"interval oracle", interval_oracle},
      {"warm-up gates", warmup},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
