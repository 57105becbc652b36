// Copyright 2026 The Lanekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lanekit/events.hpp"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "lanekit/errors.hpp"
#include "support/test_util.hpp"

namespace lanekit {
namespace {

using testing::make_track;

RoadGeometry three_lanes() { return RoadGeometry::uniform(3, 3.7, 0.0); }

TEST(RoadGeometry, LaneIndexingConvention) {
  const RoadGeometry road = three_lanes();
  road.validate();
  // Lane 1 is leftmost (highest y); markings increase leftward.
  EXPECT_DOUBLE_EQ(road.lane_centre(1), 9.25);
  EXPECT_DOUBLE_EQ(road.lane_centre(3), 1.85);
  EXPECT_EQ(road.lane_id_at(1.0), 3);
  EXPECT_EQ(road.lane_id_at(9.0), 1);
  EXPECT_DOUBLE_EQ(road.marking_left_of(2), 7.4);
  EXPECT_DOUBLE_EQ(road.marking_right_of(2), 3.7);
  EXPECT_THROW(road.lane_centre(0), ParamError);
}

TEST(DetectCrossings, ConfinedTrackIsEmpty) {
  const auto track = make_track(1, 0, 100, 0.1, 0.0, 20.0, [](std::size_t) { return 1.85; });
  EXPECT_TRUE(detect_crossings(track, three_lanes()).empty());
}

TEST(DetectCrossings, LinearRampAnalyticOracle) {
  // Lane 1 centre (9.25) down to lane 2 centre (5.55): a rightward change
  // across the marking at 7.4. The front-centre correction is constant on a
  // linear ramp, so the crossing frame has a closed form.
  const double ts = 0.1;
  const double speed = 20.0;
  const double rate = -3.7 / 4.0;  // m/s
  const std::size_t n = 41;        // ends exactly at the lane 2 centre
  const auto track = make_track(1, 0, n, ts, 0.0, speed,
                                [&](std::size_t k) { return 9.25 + rate * ts * k; });

  const double dx = speed * ts;
  const double dy = rate * ts;
  const double sin_psi = dy / std::hypot(dx, dy);
  const double front_off = 0.5 * 4.5 * sin_psi;
  // First k with 9.25 + rate*ts*k + front_off < 7.4.
  const long expect = static_cast<long>(std::floor((7.4 - 9.25 - front_off) / (rate * ts))) + 1;

  const auto crossings = detect_crossings(track, three_lanes());
  ASSERT_EQ(crossings.size(), 1u);
  EXPECT_EQ(crossings[0].frame, expect);
  EXPECT_EQ(crossings[0].direction, Direction::right);
  EXPECT_DOUBLE_EQ(crossings[0].marking_y, 7.4);
}

TEST(DetectCrossings, LeftwardRampDirection) {
  const double ts = 0.1;
  const auto track = make_track(1, 0, 80, ts, 0.0, 20.0,
                                [&](std::size_t k) { return 5.55 + (3.7 / 4.0) * ts * k; });
  const auto crossings = detect_crossings(track, three_lanes());
  ASSERT_EQ(crossings.size(), 1u);
  EXPECT_EQ(crossings[0].direction, Direction::left);
}

TEST(DetectCrossings, OscillationGuardMerges) {
  const double ts = 0.1;
  // Dip across the marking at 7.4 and back within a second, then a real
  // crossing much later.
  const auto y_of = [&](std::size_t k) {
    const double t = k * ts;
    if (t < 2.0) return 9.25;
    if (t < 3.0) return 7.0;   // first crossing (down)
    if (t < 20.0) return 9.0;  // back up within the merge window -> merged
    return 5.55;               // second excursion, past the window
  };
  const auto track = make_track(1, 0, 260, ts, 0.0, 20.0, y_of);
  const auto crossings = detect_crossings(track, three_lanes(), 2.0);
  // Same-marking recrossings at t=2 and t=3 merge; the final descent at
  // t=20 is a separate event.
  ASSERT_EQ(crossings.size(), 2u);
  EXPECT_EQ(crossings[0].direction, Direction::right);
  EXPECT_EQ(crossings[1].direction, Direction::right);
  EXPECT_GT(crossings[1].frame - crossings[0].frame, 20);
}

TEST(DetectCrossings, MirrorSymmetry) {
  // Mirroring the track across the road centreline flips every direction
  // and preserves the crossing frames.
  const double ts = 0.1;
  const double span = 11.1;  // 3 lanes * 3.7
  const auto y_of = [&](std::size_t k) {
    const double t = k * ts;
    return 5.55 + 2.5 * std::sin(0.35 * t);
  };
  const auto track = make_track(1, 0, 400, ts, 0.0, 20.0, y_of);
  const auto mirrored =
      make_track(1, 0, 400, ts, 0.0, 20.0, [&](std::size_t k) { return span - y_of(k); });

  const auto a = detect_crossings(track, three_lanes());
  const auto b = detect_crossings(mirrored, three_lanes());
  ASSERT_FALSE(a.empty());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].frame, b[i].frame);
    EXPECT_NE(a[i].direction, b[i].direction);
    EXPECT_NEAR(a[i].marking_y, span - b[i].marking_y, 1e-9);
  }
}

TEST(FindInitiation, StepSignal) {
  std::vector<double> ls(100, 0.0);
  for (std::size_t k = 50; k < ls.size(); ++k) ls[k] = 0.3;
  const auto r = find_initiation(ls, 0, 80, Direction::left, 0.1);
  EXPECT_EQ(r.frame, 50);
  EXPECT_FALSE(r.low_confidence);
}

TEST(FindInitiation, BlipIsIgnoredByBackwardScan) {
  std::vector<double> ls(100, 0.0);
  ls[20] = 0.12;  // brief blip, not the initiation
  for (std::size_t k = 60; k < ls.size(); ++k) ls[k] = 0.4;
  const auto r = find_initiation(ls, 0, 90, Direction::left, 0.1);
  EXPECT_EQ(r.frame, 60);
  EXPECT_FALSE(r.low_confidence);
}

TEST(FindInitiation, NeverBelowThresholdFlagsFirstFrame) {
  std::vector<double> ls(50, 0.5);
  const auto r = find_initiation(ls, 10, 40, Direction::left, 0.1);
  EXPECT_EQ(r.frame, 10);
  EXPECT_TRUE(r.low_confidence);
}

TEST(FindInitiation, RightwardUsesNegatedSignal) {
  std::vector<double> ls(100, 0.0);
  for (std::size_t k = 30; k < ls.size(); ++k) ls[k] = -0.25;
  const auto r = find_initiation(ls, 0, 70, Direction::right, 0.1);
  EXPECT_EQ(r.frame, 30);
}

TEST(FindInitiation, InvariantToAppendedFrames) {
  std::vector<double> ls(80, 0.0);
  for (std::size_t k = 40; k < ls.size(); ++k) ls[k] = 0.3;
  const auto base = find_initiation(ls, 0, 70, Direction::left, 0.1);
  ls.resize(160, 0.7);  // junk after the crossing
  const auto extended = find_initiation(ls, 0, 70, Direction::left, 0.1);
  EXPECT_EQ(base.frame, extended.frame);
  EXPECT_EQ(base.low_confidence, extended.low_confidence);
}

TEST(FindInitiation, ShortRunIsLowConfidence) {
  std::vector<double> ls(100, 0.0);
  for (std::size_t k = 58; k < 61; ++k) ls[k] = 0.4;  // 0.3 s run
  const auto r = find_initiation(ls, 0, 60, Direction::left, 0.1, 0.1, 0.5);
  EXPECT_EQ(r.frame, 58);
  EXPECT_TRUE(r.low_confidence);
}

// Exclusion scenes: ego plus configurable left-lane traffic.
struct Scene {
  std::vector<VehicleTrack> tracks;
  RoadGeometry road = three_lanes();

  // Ego in lane 2 crossing into lane 1 at frame 60, initiation at 40.
  LaneChangeEvent make_ego(double ego_speed = 20.0) {
    auto ego = make_track(1, 0, 100, 0.1, 0.0, ego_speed, [](std::size_t k) {
      return 5.55 + (k > 40 ? 0.1 * (k - 40.0) : 0.0);
    });
    ego.lateral_speed.assign(ego.size(), 0.0);
    ego.longitudinal_speed.assign(ego.size(), ego_speed);
    tracks.push_back(ego);
    LaneChangeEvent e;
    e.vehicle_id = 1;
    e.crossing_frame = 60;
    e.initiation_frame = 40;
    e.direction = Direction::left;
    return e;
  }

  void add_left_vehicle(long id, double x0, double speed) {
    auto v = make_track(id, 0, 100, 0.1, x0, speed, [](std::size_t) { return 9.25; });
    v.longitudinal_speed.assign(v.size(), speed);
    tracks.push_back(v);
  }
};

TEST(ApplyExclusions, RightwardIsMandatory) {
  Scene s;
  auto e = s.make_ego();
  e.direction = Direction::right;
  std::vector<LaneChangeEvent> events = {e};
  SceneIndex scenes(&s.tracks);
  apply_exclusions(events, s.road, scenes, EventParams{});
  EXPECT_TRUE(events[0].excluded);
  EXPECT_EQ(events[0].exclusion_reason, "mandatory_right");
}

TEST(ApplyExclusions, FrontLeftHeadwayBelowThreshold) {
  Scene s;
  auto e = s.make_ego(20.0);
  // At the initiation frame (4 s in) the ego sits at x = 80. Place the FL
  // so its bumper gap is 30 m there: headway 30 / 20 = 1.5 s <= 2 s.
  s.add_left_vehicle(2, (80.0 + 30.0 + 4.5) - 4.0 * 20.0, 20.0);
  std::vector<LaneChangeEvent> events = {e};
  SceneIndex scenes(&s.tracks);
  apply_exclusions(events, s.road, scenes, EventParams{});
  EXPECT_TRUE(events[0].excluded);
  EXPECT_EQ(events[0].exclusion_reason, "headway");
}

TEST(ApplyExclusions, RearLeftHeadwayUsesTrailingSpeed) {
  // RL 30 m behind at initiation: at 20 m/s its own headway is 1.5 s ->
  // excluded; at 10 m/s it is 3 s -> retained.
  for (const auto& [rl_speed, expect_excluded] :
       {std::pair{20.0, true}, std::pair{10.0, false}}) {
    Scene s;
    auto e = s.make_ego(20.0);
    s.add_left_vehicle(3, (80.0 - 30.0 - 4.5) - 4.0 * rl_speed, rl_speed);
    std::vector<LaneChangeEvent> events = {e};
    SceneIndex scenes(&s.tracks);
    apply_exclusions(events, s.road, scenes, EventParams{});
    EXPECT_EQ(events[0].excluded, expect_excluded) << "rl_speed=" << rl_speed;
  }
}

TEST(ApplyExclusions, EmptyLeftLaneRetained) {
  Scene s;
  auto e = s.make_ego();
  std::vector<LaneChangeEvent> events = {e};
  SceneIndex scenes(&s.tracks);
  apply_exclusions(events, s.road, scenes, EventParams{});
  EXPECT_FALSE(events[0].excluded);
}

TEST(ApplyExclusions, RampProximity) {
  Scene s;
  auto e = s.make_ego(20.0);
  s.road.ramp_zones.push_back({200.0, 260.0});  // crossing at x = 120, margin 100 reaches it
  std::vector<LaneChangeEvent> events = {e};
  SceneIndex scenes(&s.tracks);
  apply_exclusions(events, s.road, scenes, EventParams{});
  EXPECT_TRUE(events[0].excluded);
  EXPECT_EQ(events[0].exclusion_reason, "ramp");
}

TEST(ApplyExclusions, MissingEgoDataIsIndeterminate) {
  Scene s;
  auto e = s.make_ego();
  e.initiation_frame = -50;  // outside the recorded range
  std::vector<LaneChangeEvent> events = {e};
  SceneIndex scenes(&s.tracks);
  apply_exclusions(events, s.road, scenes, EventParams{});
  EXPECT_TRUE(events[0].excluded);
  EXPECT_EQ(events[0].exclusion_reason, "indeterminate");
}

TEST(ApplyExclusions, RetainedEventsSatisfyHeadwaysProperty) {
  // Property: every retained left change has both left-lane headways above
  // the 2 s threshold at the initiation, re-derived independently here.
  Rng rng(606);
  for (int trial = 0; trial < 50; ++trial) {
    Scene s;
    auto e = s.make_ego(20.0);
    const int extras = static_cast<int>(rng.bounded(4));
    for (int i = 0; i < extras; ++i) {
      s.add_left_vehicle(10 + i, rng.uniform(-120.0, 200.0), rng.uniform(8.0, 30.0));
    }
    std::vector<LaneChangeEvent> events = {e};
    SceneIndex scenes(&s.tracks);
    apply_exclusions(events, s.road, scenes, EventParams{});

    // Independent recomputation over the raw tracks at the initiation frame:
    // the rule binds on the nearest front-left and nearest rear-left.
    const long f = e.initiation_frame;
    const double ego_x = 20.0 * 0.1 * static_cast<double>(f);
    double fl_dx = std::numeric_limits<double>::infinity();
    double rl_dx = std::numeric_limits<double>::infinity();
    double rl_speed = 0.0;
    for (const auto& t : s.tracks) {
      if (t.vehicle_id == 1 || !t.covers(f)) continue;
      const RawSample& o = t.at_frame(f);
      if (o.y < 7.4) continue;  // not in the left lane
      const double dx = o.x - ego_x;
      if (dx >= 0.0 && dx <= 100.0 && dx < fl_dx) fl_dx = dx;
      if (dx < 0.0 && -dx <= 100.0 && -dx < rl_dx) {
        rl_dx = -dx;
        rl_speed = o.speed;
      }
    }
    const double inf = std::numeric_limits<double>::infinity();
    const double fl_headway = std::isfinite(fl_dx) ? (fl_dx - 4.5) / 20.0 : inf;
    const double rl_headway =
        std::isfinite(rl_dx) ? (rl_speed > 1e-9 ? (rl_dx - 4.5) / rl_speed : inf) : inf;
    const bool safe = fl_headway > 2.0 && rl_headway > 2.0;
    EXPECT_EQ(!events[0].excluded, safe) << "trial " << trial;
    EXPECT_LT(events[0].initiation_frame, events[0].crossing_frame);
  }
}

TEST(SampleLaneKeep, ShortWindowReturnsWhatExists) {
  const auto track = make_track(1, 0, 60, 0.1, 0.0, 20.0, [](std::size_t) { return 1.85; });
  Rng rng(5);
  // warmup 3 s = frame 30, margin 1 s; initiation 41 -> window = {30, 31}.
  bool short_window = false;
  const auto frames = sample_lane_keep(track, 41, 2, rng, 3.0, 1.0, &short_window);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_TRUE(short_window);
  EXPECT_EQ(frames[0], 30);
  EXPECT_EQ(frames[1], 31);
}

TEST(SampleLaneKeep, SeededReproducibilityAndBounds) {
  const auto track = make_track(1, 0, 400, 0.1, 0.0, 20.0, [](std::size_t) { return 1.85; });
  Rng rng_a(42);
  Rng rng_b(42);
  const auto a = sample_lane_keep(track, 350, 5, rng_a);
  const auto b = sample_lane_keep(track, 350, 5, rng_b);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a[i], 30);
    EXPECT_LE(a[i], 340);  // initiation minus the 1 s margin
    if (i > 0) {
      EXPECT_LT(a[i - 1], a[i]);
    }
  }
}

TEST(SampleLaneKeep, WindowBeforeWarmupIsEmpty) {
  const auto track = make_track(1, 0, 100, 0.1, 0.0, 20.0, [](std::size_t) { return 1.85; });
  Rng rng(1);
  bool short_window = false;
  const auto frames = sample_lane_keep(track, 10, 3, rng, 3.0, 1.0, &short_window);
  EXPECT_TRUE(frames.empty());
  EXPECT_TRUE(short_window);
}

}  // namespace
}  // namespace lanekit
