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

#include <benchmark/benchmark.h>

#include "lanekit/forest.hpp"
#include "lanekit/planner.hpp"
#include "lanekit/synth.hpp"
#include "lanekit/trajdata.hpp"

namespace {

using namespace lanekit;

SynthConfig small_synth() {
  SynthConfig cfg;
  cfg.n_vehicles = 20;
  cfg.instances_per_vehicle = 20;
  return cfg;
}

void BM_ForestTrain(benchmark::State& state) {
  const Dataset data = synth_feature_corpus(small_synth());
  TrainConfig cfg;
  cfg.n_trees = static_cast<int>(state.range(0));
  cfg.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(data, cfg));
  }
}
BENCHMARK(BM_ForestTrain)->Arg(10)->Arg(100);

void BM_ForestPredict(benchmark::State& state) {
  const Dataset data = synth_feature_corpus(small_synth());
  TrainConfig cfg;
  cfg.seed = 3;
  const Forest forest = train(data, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_proba(forest, data.features[i++ % data.size()]));
  }
}
BENCHMARK(BM_ForestPredict);

void BM_SolveDare(benchmark::State& state) {
  const PlantModel model = build_model(25.0, 2.7, 0.1);
  const Eigen::Matrix3d Q = Eigen::Vector3d(1e3, 1e-2, 1e-2).asDiagonal();
  const Eigen::Matrix2d R = Eigen::Vector2d(1e1, 1e-2).asDiagonal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dare(model.A, model.B, Q, R));
  }
}
BENCHMARK(BM_SolveDare);

void BM_SolveMpc(benchmark::State& state) {
  const PlantModel model = build_model(25.0, 2.7, 0.1);
  const MpcWeights weights = MpcWeights::defaults(model);
  const RoadGeometry road = RoadGeometry::uniform(3, 3.7);
  AgentState ego;
  ego.vehicle_id = 1;
  ego.x = 0.0;
  ego.y = road.lane_centre(2);
  ego.speed = 25.0;
  const CollisionSet set =
      build_collision_set({}, ego, road, Manoeuvre::lane_change, TargetParams{});
  const Eigen::Vector3d xi0(road.lane_centre(2), 0.0, 25.0);
  TargetPose target{road.lane_centre(1), 0.0, 28.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mpc(model, weights, xi0, 0.0, target, set));
  }
}
BENCHMARK(BM_SolveMpc);

void BM_EkfSmooth(benchmark::State& state) {
  VehicleTrack track;
  track.vehicle_id = 1;
  track.ts = 0.1;
  for (long k = 0; k < 600; ++k) {
    RawSample s;
    s.vehicle_id = 1;
    s.frame = k;
    s.x = 2.0 * static_cast<double>(k);
    s.y = 1.85;
    s.speed = 20.0;
    track.samples.push_back(s);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ekf_smooth(track, EkfConfig{}));
  }
}
BENCHMARK(BM_EkfSmooth);

}  // namespace

BENCHMARK_MAIN();
