#include <doctest.h>

#include <random>

#include "oracles/interval_oracle.hpp"
#include "vsynopsis/error.hpp"
#include "vsynopsis/segments.hpp"

using namespace vsyn;

namespace {

std::vector<AnomalyEvent> at_times(std::initializer_list<double> ts, TrackId id = 1) {
  std::vector<AnomalyEvent> out;
  for (double t : ts) out.push_back({id, "car", t, static_cast<std::int64_t>(std::lround(t * 25)), 0.2});
  return out;
}

Segment seg(double a, double b, std::int64_t n = 5, std::set<TrackId> tracks = {1}) {
  return {a, b, n, std::move(tracks)};
}

CutList cut(std::vector<Segment> s, double duration = 600.0, std::string id = "cam0") {
  return {std::move(s), duration, std::move(id)};
}

double total(const CutList& c) { return report(c).total_summary_s; }

}  // namespace

TEST_CASE("build_segments splits on gaps above one second") {
  SynopsisConfig c;
  auto s = build_segments(at_times({10.0, 10.4, 10.9, 11.3, 11.8}), c);
  REQUIRE(s.size() == 1);
  CHECK(s[0].start_s == 10.0);
  CHECK(s[0].end_s == 11.8);
  CHECK(s[0].event_count == 5);

  s = build_segments(at_times({10, 10.5, 20, 20.5}), c);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == seg(10, 10.5, 2));
  CHECK(s[1] == seg(20, 20.5, 2));

  CHECK(build_segments({}, c).empty());

  // A gap of exactly one second stays inside the segment, even with frame
  // timestamps that are not exact in binary.
  s = build_segments(at_times({37.0 / 25.0, 62.0 / 25.0}), c);
  CHECK(s.size() == 1);
}

TEST_CASE("build_segments pools tracks and covers every event") {
  SynopsisConfig c;
  auto events = at_times({1.0, 1.5, 9.0}, 1);
  auto more = at_times({2.2, 9.1}, 2);
  events.insert(events.end(), more.begin(), more.end());
  const auto s = build_segments(events, c);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == seg(1.0, 2.2, 3, {1, 2}));
  CHECK(s[1] == seg(9.0, 9.1, 2, {1, 2}));
  for (const auto& e : events) {
    int inside = 0;
    for (const auto& g : s) inside += e.timestamp_s >= g.start_s && e.timestamp_s <= g.end_s;
    CHECK(inside == 1);
  }
}

TEST_CASE("drop_small_segments keeps counts at the floor") {
  SynopsisConfig c;
  CHECK(drop_small_segments({seg(0, 1, 4)}, c).empty());
  CHECK(drop_small_segments({seg(0, 1, 5)}, c).size() == 1);
  const auto kept = drop_small_segments({seg(0, 1, 3), seg(2, 3, 5), seg(4, 5, 12)}, c);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].event_count == 5);
  CHECK(kept[1].event_count == 12);
}

TEST_CASE("pad_segments widens short pieces around their midpoint") {
  auto p = pad_segments({seg(10.0, 10.2)}, 1.0, 600.0);
  CHECK(p[0].start_s == doctest::Approx(9.6));
  CHECK(p[0].end_s == doctest::Approx(10.6));
  p = pad_segments({seg(0.1, 0.1)}, 1.0, 600.0);
  CHECK(p[0].start_s == 0.0);
  CHECK(p[0].end_s == doctest::Approx(0.6));
  p = pad_segments({seg(59.9, 59.95)}, 1.0, 60.0);
  CHECK(p[0].end_s == 60.0);
  CHECK(p[0].start_s == doctest::Approx(59.425));
  p = pad_segments({seg(3, 7)}, 1.0, 60.0);
  CHECK(p[0] == seg(3, 7));
}

TEST_CASE("merge_close merges gaps below three seconds") {
  SynopsisConfig c;
  auto m = merge_close({seg(10, 12, 5, {1}), seg(13, 15, 6, {2})}, c);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == seg(10, 15, 11, {1, 2}));

  m = merge_close({seg(10, 12), seg(15, 16)}, c);
  CHECK(m.size() == 2);

  m = merge_close({seg(0, 1), seg(2, 3), seg(4, 5)}, c);
  REQUIRE(m.size() == 1);
  CHECK(m[0].start_s == 0);
  CHECK(m[0].end_s == 5);
  CHECK(m[0].event_count == 15);
}

TEST_CASE("merge_close is a fixpoint and leaves only wide gaps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Segment> s;
    double t = 0.0;
    for (int i = 0; i < 12; ++i) {
      t += u(rng);
      const double a = t;
      t += u(rng);
      s.push_back(seg(a, t));
    }
    SynopsisConfig c;
    c.merge_seconds = u(rng);
    const auto once = merge_close(s, c);
    CHECK(merge_close(once, c) == once);
    for (std::size_t i = 1; i < once.size(); ++i) CHECK(once[i].start_s - once[i - 1].end_s >= c.merge_seconds - 1e-9);

    // Scanning right to left gives the same pieces.
    std::vector<Segment> rev(s.rbegin(), s.rend());
    CHECK(merge_close(rev, c) == once);
  }
}

TEST_CASE("intersect_stereo") {
  const auto a = cut({seg(5, 10, 7, {1}), seg(20, 30, 9, {2})});
  const auto b = cut({seg(8, 25, 6, {3})}, 600.0, "camB");
  const auto x = intersect_stereo(a, b, 0.0);
  REQUIRE(x.segments.size() == 2);
  CHECK(x.segments[0] == seg(8, 10, 6, {1, 3}));
  CHECK(x.segments[1] == seg(20, 25, 6, {2, 3}));
  CHECK(x.camera_id == "cam0+camB");

  CHECK(intersect_stereo(a, a, 0.0) == a);
  CHECK(intersect_stereo(a, cut({seg(40, 50)}), 0.0).segments.empty());
  CHECK(intersect_stereo(a, cut({}), 0.0).segments.empty());

  // b runs 2 s ahead of a.
  const auto shifted = intersect_stereo(a, cut({seg(10, 27)}), 2.0);
  REQUIRE(shifted.segments.size() == 2);
  CHECK(shifted.segments[0].start_s == 8.0);
  CHECK(shifted.segments[1].end_s == 25.0);

  // Touching intervals do not produce a piece, even with inexact offsets.
  CHECK(intersect_stereo(cut({seg(1.0, 2.0)}), cut({seg(2.3, 3.0)}), 0.3).segments.empty());

  SynopsisConfig c;
  c.stereo_offset_seconds = 2.0;
  CHECK(intersect_stereo(a, cut({seg(10, 27)}), c) == shifted);
}

TEST_CASE("intersect_stereo is symmetric up to the clock and never grows") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> step(1, 40), off(-50, 50);
  auto random_cut = [&] {
    std::vector<Segment> s;
    int t = 0;
    for (int i = 0; i < 6; ++i) {
      t += step(rng);
      const int a = t;
      t += step(rng);
      s.push_back(seg(a / 10.0, t / 10.0, step(rng), {static_cast<TrackId>(i)}));
    }
    return cut(s);
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_cut(), b = random_cut();
    const double d = off(rng) / 10.0;
    const auto ab = intersect_stereo(a, b, d);
    auto ba = intersect_stereo(b, a, -d);
    REQUIRE(ab.segments.size() == ba.segments.size());
    for (std::size_t i = 0; i < ab.segments.size(); ++i) {
      CHECK(ab.segments[i].start_s == doctest::Approx(ba.segments[i].start_s - d).epsilon(1e-12));
      CHECK(ab.segments[i].end_s == doctest::Approx(ba.segments[i].end_s - d).epsilon(1e-12));
      CHECK(ab.segments[i].event_count == ba.segments[i].event_count);
      CHECK(ab.segments[i].source_tracks == ba.segments[i].source_tracks);
    }
    CHECK(total(ab) <= std::min(total(a), total(b)) + 1e-9);
  }
}

TEST_CASE("timeline oracle agrees on random instances") {
  const auto rep = oracle::random_instances(500, 2718);
  CHECK(rep.instances == 500);
  CHECK_MESSAGE(rep.failures == 0, rep.first_failure);
}

TEST_CASE("report arithmetic") {
  auto r = report(cut({}, 600.0));
  CHECK(r.total_summary_s == 0.0);
  CHECK(r.pieces == 0);
  CHECK(r.avg_piece_s == 0.0);
  CHECK(r.summary_rate_percent == 0.0);

  r = report(cut({seg(0, 60)}, 600.0));
  CHECK(r.total_summary_s == 60.0);
  CHECK(r.pieces == 1);
  CHECK(r.avg_piece_s == 60.0);
  CHECK(r.summary_rate_percent == doctest::Approx(10.0));

  std::vector<Segment> pieces;
  for (int i = 0; i < 34; ++i) pieces.push_back(seg(30.0 * i, 30.0 * i + 209.0 / 34.0));
  r = report(cut(pieces, 1200.0));
  CHECK(r.pieces == 34);
  CHECK(r.total_summary_s == doctest::Approx(209.0));
  CHECK(std::round(r.avg_piece_s * 10) / 10 == doctest::Approx(6.1));
  CHECK(std::round(r.summary_rate_percent * 10) / 10 == doctest::Approx(17.4));
  CHECK(format_minutes(r.total_summary_s) == "3:29");

  CHECK(report(cut({seg(0, 1)}, 0.0)).summary_rate_percent == 0.0);
}

TEST_CASE("gap and merge knobs never add pieces") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> tick(0, 1200);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AnomalyEvent> events;
    for (int i = 0; i < 60; ++i) events.push_back({1 + i % 3, "car", tick(rng) / 10.0, 0, 0.1});
    SynopsisConfig c;

    // Gap monotonicity holds for build then merge. The event floor and the
    // 1 s padding both break it in the full chain: a wider gap can lift a run
    // over the floor, or join short pieces into one that no longer gets padded
    // far enough to reach its neighbour.
    std::size_t prev = SIZE_MAX;
    for (double g : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      c.gap_seconds = g;
      const auto n = merge_close(build_segments(events, c), c).size();
      CHECK(n <= prev);
      prev = n;
    }

    c.gap_seconds = 1.0;
    c.min_segment_events = 2;
    prev = SIZE_MAX;
    for (double m : {0.0, 0.5, 1.0, 3.0, 6.0}) {
      c.merge_seconds = m;
      const auto n = make_cut_list(events, c, 200.0, "cam0").segments.size();
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("padding can make a wider gap produce more pieces") {
  // At gap 0.25 the events at 10.0 and 10.5 stay apart and pad to [9.5, 10.5]
  // and [10.0, 11.0], 2.8 s from the one-second run at 13.8. At gap 1.0 they
  // form [10.0, 10.5], padded to [9.75, 10.75], which is 3.05 s away.
  SynopsisConfig c;
  c.min_segment_events = 1;
  std::vector<AnomalyEvent> events = {{1, "car", 10.0, 0, 0.1}, {1, "car", 10.5, 0, 0.1}};
  for (double t : {13.8, 14.0, 14.2, 14.4, 14.6, 14.8}) events.push_back({2, "car", t, 0, 0.1});
  c.gap_seconds = 0.25;
  CHECK(make_cut_list(events, c, 60.0, "cam0").segments.size() == 1);
  c.gap_seconds = 1.0;
  CHECK(make_cut_list(events, c, 60.0, "cam0").segments.size() == 2);
}

TEST_CASE("cut list JSON round trip and validation") {
  const auto a = cut({seg(5, 10, 7, {1, 4}), seg(20, 30.5, 9, {2})}, 120.0);
  CHECK(cut_list_from_json(cut_list_to_json(a)) == a);
  CHECK_THROWS_AS(cut_list_from_json(R"({"video_duration_s": 10, "segments": [{"start_s": 5, "end_s": 4}]})"),
                  ValidationError);
  CHECK_THROWS_AS(cut_list_from_json(R"({"video_duration_s": 10, "segments": [{"start_s": 5, "end_s": 11}]})"),
                  ValidationError);
  CHECK_THROWS_AS(cut_list_from_json("{\n\"segments\": ]"), FormatError);
  CHECK_THROWS_AS(cut_list_from_json(R"({"segments": []})"), FormatError);
}
