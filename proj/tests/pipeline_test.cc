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

// End-to-end checks of the command-line pipeline: artifact chaining, exit
// codes, and manifest-level reproducibility.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include "gtest/gtest.h"
#include "lanekit/config.hpp"
#include "lanekit/dataset.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/manifest.hpp"
#include "support/test_util.hpp"

namespace lanekit {
namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LANEKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

TEST(Cli, UsageAndHelpExitCodes) {
  EXPECT_EQ(run_cli("frobnicate"), 2);  // unknown subcommand
  EXPECT_EQ(run_cli(""), 2);            // a subcommand is required
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Cli, MissingUpstreamArtifactIsADependencyError) {
  testing::TempDir dir("dep");
  EXPECT_EQ(run_cli("--out " + dir.path("out") + " label"), 3);
  // Machine-readable error report.
  const std::string report = testing::slurp(dir.path("out") + "/error_report.json");
  EXPECT_NE(report.find("dependency"), std::string::npos);
  EXPECT_NE(report.find("smoothed_tracks.csv"), std::string::npos);
}

TEST(Cli, ValidationFailureIsExitOne) {
  testing::TempDir dir("val");
  fs::create_directories(dir.path("out"));
  // Single-class instance file cannot train a forest.
  testing::write_file(dir.path("out") + "/features.csv",
                      "vehicle_id,frame,label,x_RL\n"
                      "1,0,lane_keep,1\n"
                      "2,1,lane_keep,2\n"
                      "3,2,lane_keep,3\n"
                      "4,3,lane_keep,4\n"
                      "5,4,lane_keep,5\n");
  EXPECT_EQ(run_cli("--out " + dir.path("out") + " train"), 1);
  const std::string report = testing::slurp(dir.path("out") + "/error_report.json");
  EXPECT_NE(report.find("validation"), std::string::npos);
}

TEST(Cli, SubcommandChainProducesDeclaredArtifacts) {
  testing::TempDir dir("chain");
  const std::string out = dir.path("out");
  const std::string cfg = dir.path("chain.ini");
  testing::write_file(cfg,
                      "[run]\nseed = 7\n\n[synth]\nn_vehicles = 16\n"
                      "instances_per_vehicle = 10\nn_episodes = 4\n"
                      "episode_duration = 40\n\n[forest]\nn_trees = 30\n");
  const std::string base = "--config " + cfg + " --out " + out + " ";

  ASSERT_EQ(run_cli(base + "synth"), 0);
  ASSERT_EQ(run_cli(base + "ingest"), 0);
  ASSERT_EQ(run_cli(base + "label"), 0);
  ASSERT_EQ(run_cli(base + "featurize"), 0);
  ASSERT_EQ(run_cli(base + "train --instances " + out + "/synth_corpus.csv"), 0);
  ASSERT_EQ(run_cli(base + "eval"), 0);
  ASSERT_EQ(run_cli(base + "simulate"), 0);
  ASSERT_EQ(run_cli(base + "sweep --feature x_FL --lo 0 --hi 25 --step 0.5"), 0);

  for (const char* artifact :
       {"synth_corpus.csv", "synth_tracks.csv", "smoothed_tracks.csv", "ingest_report.json",
        "labeled_instances.csv", "events.json", "exclusion_summary.json", "features.csv",
        "features_sidecar.json", "forest.json", "train_report.json", "metrics.json",
        "importance.csv", "simlog.csv", "simlog.json", "overlay.csv", "comparison.json",
        "sensitivity.csv", "synth_manifest.json", "train_manifest.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / artifact)) << artifact;
  }

  const std::string sweep = testing::slurp(out + "/sensitivity.csv");
  EXPECT_NE(sweep.find("x_FL,p_lane_keep,p_lane_change"), std::string::npos);

  // The label stage found the scripted lane changes and kept them balanced.
  const auto refs = read_instance_refs_csv(out + "/labeled_instances.csv");
  ASSERT_FALSE(refs.empty());
  long changes = 0;
  long keeps = 0;
  for (const auto& r : refs) (r.label == Label::lane_change ? changes : keeps)++;
  EXPECT_EQ(changes, keeps);
}

TEST(Cli, ConfigFileAndSeedOverride) {
  testing::TempDir dir("cfg");
  const std::string out = dir.path("out");
  testing::write_file(dir.path("run.ini"),
                      "[run]\nseed = 11\n\n[synth]\nn_vehicles = 10\n"
                      "instances_per_vehicle = 10\nn_episodes = 2\n");
  ASSERT_EQ(run_cli("--config " + dir.path("run.ini") + " --out " + out + " synth"), 0);
  const Dataset corpus = read_instances_csv(out + "/synth_corpus.csv");
  EXPECT_EQ(corpus.size(), 100u);

  // The seed flag overrides the file and changes the corpus.
  const std::string out2 = dir.path("out2");
  ASSERT_EQ(run_cli("--config " + dir.path("run.ini") + " --out " + out2 + " --seed 12 synth"),
            0);
  EXPECT_NE(testing::slurp(out + "/synth_corpus.csv"),
            testing::slurp(out2 + "/synth_corpus.csv"));
  // The effective config is recorded next to the artifacts.
  EXPECT_NE(testing::slurp(out2 + "/config_used.ini").find("seed = 12"), std::string::npos);
}

TEST(Cli, RerunIsByteIdentical) {
  testing::TempDir dir("repro");
  const std::string out = dir.path("out");
  const std::string cfg = dir.path("small.ini");
  testing::write_file(cfg,
                      "[run]\nseed = 5\n\n[synth]\nn_vehicles = 12\n"
                      "instances_per_vehicle = 10\nn_episodes = 2\n"
                      "episode_duration = 30\n\n[forest]\nn_trees = 25\n");
  const std::string invocation = "--config " + cfg + " --out " + out + " all";
  ASSERT_EQ(run_cli(invocation), 0);

  std::map<std::string, std::uint64_t> first;
  for (const auto& entry : fs::directory_iterator(out)) {
    const std::string name = entry.path().filename().string();
    if (name.find("runinfo") != std::string::npos) continue;  // timestamp sidecar
    first[name] = hash_file(entry.path().string());
  }
  ASSERT_FALSE(first.empty());

  ASSERT_EQ(run_cli(invocation), 0);
  for (const auto& [name, h] : first) {
    EXPECT_EQ(hash_file((fs::path(out) / name).string()), h) << name;
  }
}

TEST(Cli, DataRootEnvVarResolvesRelativePaths) {
  testing::TempDir dir("root");
  fs::create_directories(dir.path("data"));
  testing::write_file(dir.path("data") + "/tiny.csv",
                      "vehicle_id,frame,x,y,speed,lane_id,length,width\n"
                      "1,0,0,5.55,20,2,4.5,1.8\n"
                      "1,1,2,5.55,20,2,4.5,1.8\n"
                      "1,2,4,5.55,20,2,4.5,1.8\n");
  const std::string cmd = "LANEKIT_DATA_ROOT=" + dir.path("data") + " " +
                          std::string(LANEKIT_CLI_PATH) + " --out " + dir.path("out") +
                          " ingest --data tiny.csv >/dev/null 2>&1";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(fs::exists(dir.path("out") + "/smoothed_tracks.csv"));
}

TEST(RunConfig, DefaultsMatchPublishedOperatingPoint) {
  const RunConfig cfg = RunConfig::defaults();
  EXPECT_DOUBLE_EQ(cfg.events.lat_speed_threshold, 0.1);
  EXPECT_DOUBLE_EQ(cfg.events.headway_min, 2.0);
  EXPECT_EQ(cfg.forest.n_trees, 100);
  EXPECT_EQ(cfg.sim.planner.horizon, 30);
  EXPECT_DOUBLE_EQ(cfg.sim.planner.ts, 0.1);
  EXPECT_DOUBLE_EQ(cfg.sim.threshold, 0.8);
  EXPECT_DOUBLE_EQ(cfg.sim.planner.q_y, 1e3);
  EXPECT_DOUBLE_EQ(cfg.sim.planner.q_psi, 1e-2);
  EXPECT_DOUBLE_EQ(cfg.sim.planner.r_steer, 1e1);
  EXPECT_DOUBLE_EQ(cfg.sim.planner.t_scale, 1e3);
  EXPECT_DOUBLE_EQ(cfg.sim.planner.target.t_hw, 2.0);
}

TEST(RunConfig, IniRoundTripPreservesHash) {
  testing::TempDir dir("ini");
  RunConfig cfg = RunConfig::defaults();
  cfg.seed = 123;
  cfg.events.ramp_margin = 80.0;
  cfg.ramp_zones = "100:150;900:950";
  cfg.sync_derived();
  cfg.save(dir.path("c.ini"));
  const RunConfig back = RunConfig::from_file(dir.path("c.ini"));
  EXPECT_EQ(back.hash(), cfg.hash());
  EXPECT_EQ(back.seed, 123u);
  EXPECT_DOUBLE_EQ(back.events.ramp_margin, 80.0);
  const RoadGeometry road = back.road();
  ASSERT_EQ(road.ramp_zones.size(), 2u);
  EXPECT_DOUBLE_EQ(road.ramp_zones[1].lo, 900.0);
}

TEST(RunConfig, MalformedIniThrows) {
  testing::TempDir dir("bad");
  testing::write_file(dir.path("bad.ini"), "[run\nseed = 1\n");
  EXPECT_THROW(RunConfig::from_file(dir.path("bad.ini")), ParseError);
  testing::write_file(dir.path("bad2.ini"), "[run]\nseed 1\n");
  EXPECT_THROW(RunConfig::from_file(dir.path("bad2.ini")), ParseError);
  testing::write_file(dir.path("bad3.ini"), "[run]\nseed = banana\n");
  EXPECT_THROW(RunConfig::from_file(dir.path("bad3.ini")), ParseError);
}

}  // namespace
}  // namespace lanekit
