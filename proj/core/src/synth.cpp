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

#include "lanekit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lanekit/errors.hpp"
#include "lanekit/rng.hpp"

namespace lanekit {

RoadGeometry synth_road(const SynthConfig& cfg) {
  return RoadGeometry::uniform(cfg.lanes, cfg.lane_width, 0.0);
}

bool synth_rule(const FeatureVector& f, const SynthConfig& cfg) {
  if (f.size() < kFeatureCount) throw ShapeError("synth_rule: base feature vector expected");
  return f[2] < cfg.rule_delta_max &&   // Delta: discontent with the LV
         f[5] >= cfg.rule_x_fl_min &&   // x_FL
         f[1] >= cfg.rule_ttc_rl_min && // TTC_RL
         f[0] >= cfg.rule_x_rl_min;     // x_RL
}

Dataset synth_feature_corpus(const SynthConfig& cfg) {
  if (cfg.instances_per_vehicle % 2 != 0) {
    throw ParamError("synth: instances_per_vehicle must be even for a balanced corpus");
  }
  Dataset data;
  data.feature_names = feature_names(0);
  const int per_class = cfg.instances_per_vehicle / 2;
  const double ts = cfg.ts;
  FeatureConfig fcfg;

  for (int vi = 1; vi <= cfg.n_vehicles; ++vi) {
    Rng rng(cfg.seed * 1000003ull + static_cast<std::uint64_t>(vi));
    const double ego_speed = rng.uniform(20.0, 32.0);

    // Lead-vehicle episode state.
    bool lv_present = rng.uniform() < 0.85;
    long lv_id = 900000 + vi * 100;
    double lv_gap = rng.uniform(10.0, 80.0);
    double lv_rel = rng.uniform(-5.0, 3.0);
    double drift = rng.uniform() < 0.5 ? -0.06 : 0.04;  // pressure vs relief phases

    UtilityState utility;
    std::vector<FeatureVector> change_pool;
    std::vector<FeatureVector> keep_pool;
    std::vector<long> change_frames;
    std::vector<long> keep_frames;

    const int spacing = 10;
    const int burnin = 30;
    const int frame_cap = 40000;
    for (int frame = 0; frame < frame_cap; ++frame) {
      // Evolve the LV relationship.
      if (lv_present) {
        lv_rel += drift * ts + rng.gaussian(0.0, 0.12);
        lv_rel = std::clamp(lv_rel, -8.0, 6.0);
        lv_gap += lv_rel * ts;
        if (lv_gap < 2.0) {
          lv_gap = 2.0;
          lv_rel = std::max(lv_rel, 0.0);
        }
        if (lv_gap > 120.0) lv_present = false;
      } else if (rng.uniform() < 0.01) {
        lv_present = true;
        lv_id += 1;
        lv_gap = rng.uniform(20.0, 80.0);
        lv_rel = rng.uniform(-5.0, 2.0);
      }
      if (lv_present && rng.uniform() < 0.004) {
        lv_id += 1;  // a cut-in replaces the LV; utility resets
        lv_gap = rng.uniform(8.0, 50.0);
      }
      if (rng.uniform() < 0.002) drift = -drift;

      NeighborSet n;
      if (lv_present) {
        n.lv.present = true;
        n.lv.vehicle_id = lv_id;
        n.lv.gap = lv_gap;
        n.lv.rel_speed = lv_rel;
        n.lv.speed = std::max(0.0, ego_speed + lv_rel);
      }
      utility = utility_step(utility, n, frame);

      if (frame < burnin || frame % spacing != 0) continue;
      if (static_cast<int>(change_pool.size()) >= per_class &&
          static_cast<int>(keep_pool.size()) >= per_class) {
        break;
      }

      // Left-lane pair drawn fresh at each sampled instant.
      if (rng.uniform() < 0.7) {
        n.fl.present = true;
        n.fl.vehicle_id = 800000 + frame;
        n.fl.gap = rng.uniform(0.5, 110.0);
        n.fl.rel_speed = rng.gaussian(0.0, 3.0);
        n.fl.speed = std::max(0.0, ego_speed + n.fl.rel_speed);
      }
      if (rng.uniform() < 0.7) {
        n.rl.present = true;
        n.rl.vehicle_id = 850000 + frame;
        n.rl.gap = rng.uniform(0.5, 95.0);
        n.rl.rel_speed = rng.gaussian(0.5, 3.0);
        n.rl.speed = std::max(0.0, ego_speed + n.rl.rel_speed);
      }

      // Pools are balanced on the generating rule; label noise is applied
      // afterwards so the flip rate stays unconditional.
      FeatureVector f = featurize(n, ego_speed, utility, fcfg);
      if (synth_rule(f, cfg)) {
        if (static_cast<int>(change_pool.size()) < per_class) {
          change_pool.push_back(std::move(f));
          change_frames.push_back(frame);
        }
      } else if (static_cast<int>(keep_pool.size()) < per_class) {
        keep_pool.push_back(std::move(f));
        keep_frames.push_back(frame);
      }
    }
    if (static_cast<int>(change_pool.size()) < per_class ||
        static_cast<int>(keep_pool.size()) < per_class) {
      throw NumericError("synth: episode for vehicle " + std::to_string(vi) +
                         " failed to produce a balanced sample");
    }
    for (int i = 0; i < per_class; ++i) {
      data.push(vi, change_frames[static_cast<std::size_t>(i)], Label::lane_change,
                change_pool[static_cast<std::size_t>(i)]);
      data.push(vi, keep_frames[static_cast<std::size_t>(i)], Label::lane_keep,
                keep_pool[static_cast<std::size_t>(i)]);
    }
  }

  // Exactly label_noise of each class flips, keeping the corpus balanced.
  // Membership is taken before any flip so the two passes stay disjoint.
  Rng flip_rng(cfg.seed * 69069ull + 1);
  std::vector<std::size_t> change_members;
  std::vector<std::size_t> keep_members;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.labels[i] == Label::lane_change ? change_members : keep_members).push_back(i);
  }
  for (auto* members : {&change_members, &keep_members}) {
    flip_rng.shuffle(*members);
    const std::size_t flips = static_cast<std::size_t>(
        std::llround(cfg.label_noise * static_cast<double>(members->size())));
    for (std::size_t k = 0; k < flips && k < members->size(); ++k) {
      const std::size_t i = (*members)[k];
      data.labels[i] = data.labels[i] == Label::lane_change ? Label::lane_keep
                                                            : Label::lane_change;
    }
  }
  return data;
}

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

std::vector<VehicleTrack> synth_tracks(const SynthConfig& cfg) {
  const RoadGeometry road = synth_road(cfg);
  std::vector<VehicleTrack> tracks;
  const long frames_per_episode = static_cast<long>(std::llround(cfg.episode_duration / cfg.ts));

  for (int ep = 0; ep < cfg.n_episodes; ++ep) {
    Rng rng(cfg.seed * 7919ull + static_cast<std::uint64_t>(ep) + 1);
    const long frame0 = static_cast<long>(ep) * (frames_per_episode + 100);
    const long id0 = 1 + ep * 10;
    const bool change_episode = ep % 2 == 0;

    const int ego_lane = 2;
    const double ego_y0 = road.lane_centre(ego_lane);
    const double left_y = road.lane_centre(ego_lane - 1);

    const double v_lv = rng.uniform(14.0, 18.0);
    const double v_ego0 = v_lv + rng.uniform(6.0, 10.0);
    const double gap0 = rng.uniform(60.0, 90.0);
    const double gap_decide = rng.uniform(24.0, 32.0);
    const double t_lc = rng.uniform(3.5, 4.5);

    VehicleTrack ego;
    ego.vehicle_id = id0;
    ego.ts = cfg.ts;
    VehicleTrack lv;
    lv.vehicle_id = id0 + 1;
    lv.ts = cfg.ts;
    VehicleTrack blocker;  // front-left vehicle present only in keep episodes
    blocker.vehicle_id = id0 + 2;
    blocker.ts = cfg.ts;
    VehicleTrack tail;  // distant rear-left traffic, never conflicting
    tail.vehicle_id = id0 + 3;
    tail.ts = cfg.ts;

    double ego_x = 50.0;
    double ego_v = v_ego0;
    double lv_x = ego_x + gap0;
    double blocker_x = ego_x + rng.uniform(-4.0, 6.0);
    double tail_x = ego_x - rng.uniform(70.0, 90.0);
    const double tail_v = v_ego0 - 2.0;

    double decide_time = -1.0;
    for (long k = 0; k < frames_per_episode; ++k) {
      const double t = static_cast<double>(k) * cfg.ts;
      const double gap = lv_x - ego_x - 4.5;  // bumper gap, both 4.5 m long

      if (decide_time < 0.0 && gap <= gap_decide) decide_time = t;

      double ego_y = ego_y0;
      if (decide_time >= 0.0) {
        if (change_episode) {
          ego_y = ego_y0 + (left_y - ego_y0) * smoothstep((t - decide_time) / t_lc);
        } else {
          // Blocked: relax toward the lead's speed and follow.
          ego_v += (v_lv - ego_v) * (1.0 - std::exp(-cfg.ts / 1.5));
        }
      }

      const auto emit = [&](VehicleTrack& trk, double x, double y, double speed, double len) {
        RawSample s;
        s.vehicle_id = trk.vehicle_id;
        s.frame = frame0 + k;
        s.x = x;
        s.y = y;
        s.speed = speed;
        s.lane_id = road.lane_id_at(y);
        s.length = len;
        s.width = 1.8;
        trk.samples.push_back(s);
      };

      emit(ego, ego_x, ego_y, ego_v, 4.5);
      emit(lv, lv_x, road.lane_centre(ego_lane), v_lv, 7.5);
      if (!change_episode) emit(blocker, blocker_x, left_y, v_ego0, 4.5);
      emit(tail, tail_x, left_y, tail_v, 4.5);

      ego_x += ego_v * cfg.ts;
      lv_x += v_lv * cfg.ts;
      blocker_x += v_ego0 * cfg.ts;
      tail_x += tail_v * cfg.ts;
    }

    tracks.push_back(std::move(ego));
    tracks.push_back(std::move(lv));
    if (!change_episode) tracks.push_back(std::move(blocker));
    tracks.push_back(std::move(tail));
  }
  return tracks;
}

FeatureVector synth_sweep_base(const SynthConfig& cfg) {
  NeighborSet n;
  n.lv.present = true;
  n.lv.vehicle_id = 1;
  n.lv.gap = 18.0;
  n.lv.rel_speed = -4.0;
  n.lv.speed = 21.0;
  n.fl.present = true;
  n.fl.vehicle_id = 2;
  n.fl.gap = 20.0;
  n.fl.rel_speed = 1.0;
  n.fl.speed = 26.0;
  n.rl.present = true;
  n.rl.vehicle_id = 3;
  n.rl.gap = 30.0;
  n.rl.rel_speed = 1.0;
  n.rl.speed = 26.0;
  UtilityState u;
  u.delta = 2.0 * cfg.rule_delta_max;  // firmly discontent
  return featurize(n, 25.0, u, {});
}

}  // namespace lanekit
