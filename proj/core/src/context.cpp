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

#include "lanekit/context.hpp"

#include <cmath>
#include <limits>

#include "lanekit/errors.hpp"

namespace lanekit {

namespace {

double bumper_gap(const AgentState& rear, const AgentState& front) {
  return (front.x - rear.x) - 0.5 * (front.length + rear.length);
}

// Nearest-by-centre-distance selection; the stored gap is bumper-to-bumper.
void consider_ahead(Neighbor& slot, const AgentState& ego, const AgentState& other,
                    double sensing_range, double* best_dx) {
  const double dx = other.x - ego.x;
  if (dx < 0.0 || dx > sensing_range) return;
  if (!slot.present || dx < *best_dx) {
    *best_dx = dx;
    slot.present = true;
    slot.vehicle_id = other.vehicle_id;
    slot.gap = bumper_gap(ego, other);
    slot.rel_speed = other.speed - ego.speed;
    slot.speed = other.speed;
  }
}

void consider_behind(Neighbor& slot, const AgentState& ego, const AgentState& other,
                     double sensing_range, double* best_dx) {
  const double dx = ego.x - other.x;
  if (dx <= 0.0 || dx > sensing_range) return;
  if (!slot.present || dx < *best_dx) {
    *best_dx = dx;
    slot.present = true;
    slot.vehicle_id = other.vehicle_id;
    slot.gap = bumper_gap(other, ego);
    slot.rel_speed = other.speed - ego.speed;
    slot.speed = other.speed;
  }
}

}  // namespace

NeighborSet identify_neighbors(std::span<const AgentState> snapshot, const AgentState& ego,
                               const RoadGeometry& road, TargetLane side, double sensing_range) {
  const int ego_lane = road.lane_id_at(ego.y);
  const int lv_lane = side == TargetLane::current ? ego_lane : ego_lane - 1;
  const int left_lane = ego_lane - 1;

  NeighborSet out;
  double best_lv = 0.0;
  double best_fl = 0.0;
  double best_rl = 0.0;
  for (const auto& other : snapshot) {
    if (other.vehicle_id == ego.vehicle_id) continue;
    const int other_lane = road.lane_id_at(other.y);
    if (other_lane == lv_lane) consider_ahead(out.lv, ego, other, sensing_range, &best_lv);
    if (other_lane == left_lane) {
      if (other.x >= ego.x) {
        consider_ahead(out.fl, ego, other, sensing_range, &best_fl);
      } else {
        consider_behind(out.rl, ego, other, sensing_range, &best_rl);
      }
    }
  }
  return out;
}

NeighborSet identify_neighbors(std::span<const AgentState> snapshot, long ego_id,
                               const RoadGeometry& road, TargetLane side, double sensing_range) {
  for (const auto& a : snapshot) {
    if (a.vehicle_id == ego_id) {
      return identify_neighbors(snapshot, a, road, side, sensing_range);
    }
  }
  throw LookupError("ego vehicle " + std::to_string(ego_id) + " absent from snapshot");
}

double ttc(double gap, double closing_speed, double ttc_max) {
  if (gap <= 0.0) return 0.0;
  if (closing_speed <= 0.0) return ttc_max;
  const double t = gap / closing_speed;
  return t < ttc_max ? t : ttc_max;
}

UtilityState utility_update(const UtilityState& state, double v_lv, double x_lv, long lv_id,
                            long frame) {
  if (x_lv <= 0.0) throw ParamError("utility_update requires x_lv > 0 when an LV is present");
  UtilityState s = state;
  if (lv_id != s.lv_id) {
    s.delta = 0.0;
    s.lv_id = lv_id;
    s.t0 = frame;
  }
  const double increment = v_lv / x_lv;
  if (s.delta > 0.0 && increment < 0.0) {
    s.delta = 0.0;  // a positive utility is wiped by any negative experience
  } else {
    s.delta += increment;
  }
  return s;
}

UtilityState utility_reset(const UtilityState& state, long frame) {
  UtilityState s = state;
  s.delta = 0.0;
  s.lv_id = -1;
  s.t0 = frame;
  return s;
}

UtilityState utility_step(const UtilityState& state, const NeighborSet& n, long frame) {
  if (!n.lv.present || n.lv.gap <= 0.0) return utility_reset(state, frame);
  return utility_update(state, n.lv.rel_speed, n.lv.gap, n.lv.vehicle_id, frame);
}

FeatureVector featurize(const NeighborSet& n, double ego_speed, const UtilityState& utility,
                        const FeatureConfig& cfg) {
  FeatureVector f(kFeatureCount);
  const double gap_rl = n.rl.present ? n.rl.gap : cfg.sentinel_gap;
  const double gap_fl = n.fl.present ? n.fl.gap : cfg.sentinel_gap;
  const double gap_lv = n.lv.present ? n.lv.gap : cfg.sentinel_gap;
  const double v_rl = n.rl.present ? n.rl.rel_speed : cfg.sentinel_rel_speed;
  const double v_fl = n.fl.present ? n.fl.rel_speed : cfg.sentinel_rel_speed;
  const double v_lv = n.lv.present ? n.lv.rel_speed : cfg.sentinel_rel_speed;

  f[0] = gap_rl;
  // The rear-left vehicle closes when it is faster than the ego; a lead
  // vehicle closes when the ego is faster (negative relative speed).
  f[1] = n.rl.present ? ttc(gap_rl, v_rl, cfg.ttc_max) : cfg.ttc_max;
  f[2] = utility.delta;
  f[3] = n.fl.present ? ttc(gap_fl, -v_fl, cfg.ttc_max) : cfg.ttc_max;
  f[4] = v_fl;
  f[5] = gap_fl;
  f[6] = v_rl;
  f[7] = v_lv;
  f[8] = gap_lv;
  f[9] = ego_speed;
  return f;
}

FeatureVector history_stack(std::span<const FeatureVector> series, std::size_t t, int n_past,
                            int step_gap) {
  if (n_past < 0 || step_gap < 1) throw ParamError("history_stack: n_past >= 0, step_gap >= 1");
  if (t >= series.size()) throw ShapeError("history_stack: index outside series");
  const long earliest = static_cast<long>(t) - static_cast<long>(n_past) * step_gap;
  if (earliest < 0) {
    throw ShapeError("history_stack: insufficient history at index " + std::to_string(t));
  }
  FeatureVector out;
  out.reserve(series[t].size() * (n_past + 1));
  for (int j = 0; j <= n_past; ++j) {
    const FeatureVector& block = series[t - static_cast<std::size_t>(j) * step_gap];
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<std::string> feature_names(int n_past) {
  std::vector<std::string> names;
  for (int j = 0; j <= n_past; ++j) {
    for (const char* base : kFeatureNames) {
      names.push_back(j == 0 ? std::string(base) : std::string(base) + "_p" + std::to_string(j));
    }
  }
  return names;
}

int feature_index(const std::string& name, int n_past) {
  const auto names = feature_names(n_past);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw LookupError("unknown feature '" + name + "'");
}

}  // namespace lanekit
