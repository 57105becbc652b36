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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lanekit/config.hpp"
#include "lanekit/csv.hpp"
#include "lanekit/dataset.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/forest.hpp"
#include "lanekit/manifest.hpp"
#include "lanekit/sim.hpp"
#include "lanekit/synth.hpp"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDependency = 3;

struct Cli {
  lanekit::RunConfig cfg;
  std::string out_dir = "out";
  std::string config_path;

  std::string path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

  /// Resolves a data path against LANEKIT_DATA_ROOT when relative.
  std::string data_path(const std::string& p) const {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    if (const char* root = std::getenv("LANEKIT_DATA_ROOT")) {
      const fs::path joined = fs::path(root) / p;
      if (fs::exists(joined)) return joined.string();
    }
    return p;
  }

  void require_input(const std::string& p) const {
    if (!fs::exists(p)) {
      throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                              "missing upstream artifact: " + p);
    }
  }

  lanekit::Manifest manifest(const std::string& sub) const {
    lanekit::Manifest m;
    m.subcommand = sub;
    m.config_hash = lanekit::hash_hex(cfg.hash());
    m.seed = cfg.seed;
    return m;
  }

  void finish(lanekit::Manifest& m) const {
    m.write(path(m.subcommand + "_manifest.json"));
    lanekit::write_run_sidecar(path(m.subcommand + "_runinfo.json"), m.subcommand);
  }
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw lanekit::SchemaError("cannot write " + path);
  out << j.dump(1) << '\n';
}

json metrics_to_json(const lanekit::Metrics& m) {
  return json{{"accuracy", m.accuracy},
              {"count", m.count},
              {"confusion",
               {{"keep_keep", m.confusion[0][0]},
                {"keep_change", m.confusion[0][1]},
                {"change_keep", m.confusion[1][0]},
                {"change_change", m.confusion[1][1]}}},
              {"precision", {{"lane_keep", m.precision[0]}, {"lane_change", m.precision[1]}}},
              {"recall", {{"lane_keep", m.recall[0]}, {"lane_change", m.recall[1]}}}};
}

void run_synth(const Cli& cli) {
  auto m = cli.manifest("synth");
  const lanekit::Dataset corpus = lanekit::synth_feature_corpus(cli.cfg.synth);
  lanekit::write_instances_csv(cli.path("synth_corpus.csv"), corpus);
  const auto tracks = lanekit::synth_tracks(cli.cfg.synth);
  lanekit::write_tracks_csv(cli.path("synth_tracks.csv"), tracks);
  cli.cfg.save(cli.path("config_used.ini"));
  m.outputs = {"synth_corpus.csv", "synth_tracks.csv", "config_used.ini"};
  cli.finish(m);
  std::cout << "synth: " << corpus.size() << " instances, " << tracks.size() << " tracks\n";
}

void run_ingest(const Cli& cli) {
  auto m = cli.manifest("ingest");
  std::string source = cli.data_path(cli.cfg.tracks_path);
  if (source.empty()) source = cli.path("synth_tracks.csv");
  cli.require_input(source);
  m.add_input(source);

  const lanekit::CsvSchema schema = cli.cfg.schema == "ngsim" ? lanekit::CsvSchema::ngsim()
                                                              : lanekit::CsvSchema::native();
  lanekit::LoadReport rep;
  auto tracks = lanekit::load_tracks(source, schema, cli.cfg.ts, &rep, cli.cfg.max_gap_fill);
  for (auto& t : tracks) {
    if (t.size() >= 2) t = lanekit::smooth_track(t, cli.cfg.ekf, cli.cfg.alpha);
  }
  lanekit::write_tracks_csv(cli.path("smoothed_tracks.csv"), tracks);
  write_json(cli.path("ingest_report.json"), json{{"rows_read", rep.rows_read},
                                                  {"duplicates_dropped", rep.duplicates_dropped},
                                                  {"gaps_filled", rep.gaps_filled},
                                                  {"tracks_split", rep.tracks_split},
                                                  {"tracks", tracks.size()}});
  m.outputs = {"smoothed_tracks.csv", "ingest_report.json"};
  cli.finish(m);
  std::cout << "ingest: " << tracks.size() << " tracks from " << rep.rows_read << " rows\n";
}

void run_label(const Cli& cli) {
  auto m = cli.manifest("label");
  cli.require_input(cli.path("smoothed_tracks.csv"));
  m.add_input(cli.path("smoothed_tracks.csv"));

  const auto tracks = lanekit::read_tracks_csv(cli.path("smoothed_tracks.csv"), cli.cfg.ts);
  const lanekit::RoadGeometry road = cli.cfg.road();
  const auto events = lanekit::extract_events(tracks, road, cli.cfg.events);
  lanekit::ExtractionReport rep;
  const auto refs =
      lanekit::assemble_instances(tracks, events, cli.cfg.events, cli.cfg.seed, &rep);
  lanekit::write_instance_refs_csv(cli.path("labeled_instances.csv"), refs);

  json evs = json::array();
  for (const auto& e : events) {
    evs.push_back({{"vehicle_id", e.vehicle_id},
                   {"segment", e.segment},
                   {"crossing_frame", e.crossing_frame},
                   {"initiation_frame", e.initiation_frame},
                   {"direction", lanekit::to_string(e.direction)},
                   {"low_confidence", e.low_confidence},
                   {"excluded", e.excluded},
                   {"reason", e.exclusion_reason}});
  }
  write_json(cli.path("events.json"),
             json{{"format", "lanekit-events"}, {"version", 1}, {"events", evs}});
  write_json(cli.path("exclusion_summary.json"),
             json{{"events_total", rep.events_total},
                  {"events_retained", rep.events_retained},
                  {"excluded_mandatory", rep.excluded_mandatory},
                  {"excluded_ramp", rep.excluded_ramp},
                  {"excluded_headway", rep.excluded_headway},
                  {"excluded_indeterminate", rep.excluded_indeterminate},
                  {"short_keep_windows", rep.short_keep_windows}});
  m.outputs = {"labeled_instances.csv", "events.json", "exclusion_summary.json"};
  cli.finish(m);
  std::cout << "label: " << rep.events_retained << "/" << rep.events_total
            << " events retained, " << refs.size() << " instances\n";
}

void run_featurize(const Cli& cli) {
  auto m = cli.manifest("featurize");
  cli.require_input(cli.path("smoothed_tracks.csv"));
  cli.require_input(cli.path("labeled_instances.csv"));
  m.add_input(cli.path("smoothed_tracks.csv"));
  m.add_input(cli.path("labeled_instances.csv"));

  const auto tracks = lanekit::read_tracks_csv(cli.path("smoothed_tracks.csv"), cli.cfg.ts);
  const auto refs = lanekit::read_instance_refs_csv(cli.path("labeled_instances.csv"));
  lanekit::ExtractionReport rep;
  const lanekit::Dataset data =
      lanekit::featurize_instances(tracks, cli.cfg.road(), refs, cli.cfg.features, &rep);
  lanekit::write_instances_csv(cli.path("features.csv"), data);
  write_json(cli.path("features_sidecar.json"),
             json{{"sentinel_gap", cli.cfg.features.sentinel_gap},
                  {"sentinel_rel_speed", cli.cfg.features.sentinel_rel_speed},
                  {"ttc_max", cli.cfg.features.ttc_max},
                  {"sensing_range", cli.cfg.features.sensing_range},
                  {"n_past", cli.cfg.features.n_past},
                  {"step_gap", cli.cfg.features.step_gap},
                  {"skipped_no_history", rep.skipped_no_history},
                  {"instances", data.size()}});
  m.outputs = {"features.csv", "features_sidecar.json"};
  cli.finish(m);
  std::cout << "featurize: " << data.size() << " instances x " << data.dim() << " features\n";
}

void run_train(const Cli& cli, const std::string& instances_override) {
  auto m = cli.manifest("train");
  const std::string source =
      instances_override.empty() ? cli.path("features.csv") : cli.data_path(instances_override);
  cli.require_input(source);
  m.add_input(source);

  const lanekit::Dataset all = lanekit::read_instances_csv(source);
  const auto [train_set, test_set] =
      lanekit::split_by_vehicle(all, cli.cfg.holdout_frac, cli.cfg.seed);
  const lanekit::Forest forest = lanekit::train(train_set, cli.cfg.forest);
  lanekit::save_forest_json(forest, cli.path("forest.json"));

  json test_ids = json::array();
  {
    std::vector<long> ids = test_set.vehicle_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (long v : ids) test_ids.push_back(v);
  }
  write_json(cli.path("train_report.json"), json{{"instances_total", all.size()},
                                                 {"instances_train", train_set.size()},
                                                 {"instances_test", test_set.size()},
                                                 {"oob_accuracy", forest.oob_accuracy},
                                                 {"holdout_frac", cli.cfg.holdout_frac},
                                                 {"instances_source", source},
                                                 {"test_vehicle_ids", test_ids}});
  m.outputs = {"forest.json", "train_report.json"};
  cli.finish(m);
  std::cout << "train: " << forest.trees.size() << " trees on " << train_set.size()
            << " instances (oob " << forest.oob_accuracy << ")\n";
}

void run_eval(const Cli& cli, const std::string& instances_override) {
  auto m = cli.manifest("eval");
  cli.require_input(cli.path("forest.json"));
  cli.require_input(cli.path("train_report.json"));
  m.add_input(cli.path("forest.json"));

  std::ifstream rep_in(cli.path("train_report.json"));
  json train_report;
  rep_in >> train_report;
  const std::string source = instances_override.empty()
                                 ? train_report.at("instances_source").get<std::string>()
                                 : cli.data_path(instances_override);
  cli.require_input(source);
  m.add_input(source);

  const lanekit::Forest forest = lanekit::load_forest_json(cli.path("forest.json"));
  const lanekit::Dataset all = lanekit::read_instances_csv(source);
  const auto [train_set, test_set] =
      lanekit::split_by_vehicle(all, cli.cfg.holdout_frac, cli.cfg.seed);
  const lanekit::Metrics metrics = lanekit::evaluate(forest, test_set);

  json j = metrics_to_json(metrics);
  j["test_instances"] = test_set.size();
  write_json(cli.path("metrics.json"), j);

  lanekit::CsvWriter w(cli.path("importance.csv"), {"feature", "importance"});
  for (const auto& [name, value] : lanekit::feature_importance(forest)) {
    w.row({name, lanekit::CsvWriter::format(value)});
  }
  m.outputs = {"metrics.json", "importance.csv"};
  cli.finish(m);
  std::cout << "eval: accuracy " << metrics.accuracy << " on " << test_set.size()
            << " held-out instances\n";
}

struct SimulateArgs {
  long ego_id = -1;
  long start = -1;
  long end = -1;
};

void run_simulate(const Cli& cli, const SimulateArgs& args) {
  auto m = cli.manifest("simulate");
  cli.require_input(cli.path("smoothed_tracks.csv"));
  cli.require_input(cli.path("forest.json"));
  m.add_input(cli.path("smoothed_tracks.csv"));
  m.add_input(cli.path("forest.json"));

  lanekit::Scenario sc;
  sc.tracks = lanekit::read_tracks_csv(cli.path("smoothed_tracks.csv"), cli.cfg.ts);
  sc.road = cli.cfg.road();
  if (sc.tracks.empty()) throw lanekit::ParamError("simulate: no tracks available");
  sc.ego_id = args.ego_id >= 0 ? args.ego_id : sc.tracks.front().vehicle_id;
  const lanekit::VehicleTrack* ego = nullptr;
  for (const auto& t : sc.tracks) {
    if (t.vehicle_id == sc.ego_id) {
      ego = &t;
      break;
    }
  }
  if (!ego) throw lanekit::LookupError("simulate: ego track not found");
  sc.start_frame = args.start >= 0 ? args.start : ego->first_frame();
  sc.end_frame = args.end >= 0 ? args.end : ego->last_frame();

  const lanekit::Forest forest = lanekit::load_forest_json(cli.path("forest.json"));
  const auto log = lanekit::replay_simulate(sc, forest, cli.cfg.sim);
  lanekit::write_simlog_csv(cli.path("simlog.csv"), log);
  lanekit::write_simlog_json(cli.path("simlog.json"), log);
  lanekit::write_overlay_csv(cli.path("overlay.csv"), log, *ego);

  const lanekit::ComparisonMetrics cmp = lanekit::compare_to_ground_truth(
      log, *ego, sc.road, cli.cfg.sim.completion_tol, cli.cfg.events.lat_speed_threshold);
  long ghost = 0;
  long fallback = 0;
  for (const auto& s : log) {
    ghost += s.ghost_conflict ? 1 : 0;
    fallback += s.fallback ? 1 : 0;
  }
  json cj{{"lateral_rmse", cmp.lateral_rmse},
          {"max_abs_accel", cmp.max_abs_accel},
          {"max_abs_steer", cmp.max_abs_steer},
          {"common_frames", cmp.common_frames},
          {"ghost_conflict_steps", ghost},
          {"fallback_steps", fallback}};
  if (std::isfinite(cmp.initiation_offset_s)) cj["initiation_offset_s"] = cmp.initiation_offset_s;
  if (std::isfinite(cmp.completion_offset_s)) cj["completion_offset_s"] = cmp.completion_offset_s;
  write_json(cli.path("comparison.json"), cj);

  m.outputs = {"simlog.csv", "simlog.json", "overlay.csv", "comparison.json"};
  cli.finish(m);
  std::cout << "simulate: " << log.size() << " steps, lateral rmse " << cmp.lateral_rmse << "\n";
}

struct SweepArgs {
  std::string feature = "x_FL";
  double lo = 0.0;
  double hi = 25.0;
  double step = 0.5;
};

void run_sweep(const Cli& cli, const SweepArgs& args) {
  auto m = cli.manifest("sweep");
  cli.require_input(cli.path("forest.json"));
  m.add_input(cli.path("forest.json"));

  const lanekit::Forest forest = lanekit::load_forest_json(cli.path("forest.json"));
  const int idx = lanekit::feature_index(args.feature, cli.cfg.features.n_past);
  lanekit::FeatureVector base = lanekit::synth_sweep_base(cli.cfg.synth);
  if (base.size() != forest.dim()) {
    throw lanekit::ShapeError("sweep: base vector dimension does not match the forest");
  }
  const auto curve = lanekit::sensitivity_sweep(forest, base, idx, args.lo, args.hi, args.step);
  lanekit::write_sweep_csv(cli.path("sensitivity.csv"), args.feature, curve);
  m.outputs = {"sensitivity.csv"};
  cli.finish(m);
  std::cout << "sweep: " << curve.size() << " samples of " << args.feature << "\n";
}

void run_all(const Cli& cli) {
  run_synth(cli);
  run_ingest(cli);
  run_label(cli);
  run_featurize(cli);
  run_train(cli, cli.path("synth_corpus.csv"));
  run_eval(cli, "");
  run_simulate(cli, SimulateArgs{});
  run_sweep(cli, SweepArgs{});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-change decision learning and MPC replay toolkit"};
  app.require_subcommand(1);

  Cli cli;
  cli.cfg = lanekit::RunConfig::defaults();
  std::optional<std::uint64_t> seed_override;
  std::string tracks_override;
  std::string instances_override;
  SimulateArgs sim_args;
  SweepArgs sweep_args;

  app.add_option("--config", cli.config_path, "INI configuration file");
  app.add_option("--out", cli.out_dir, "output directory (default: out)");
  app.add_option("--seed", seed_override, "override the run seed");

  auto* c_synth = app.add_subcommand("synth", "generate the synthetic corpus");
  auto* c_ingest = app.add_subcommand("ingest", "load and smooth raw trajectories");
  c_ingest->add_option("--data", tracks_override, "trajectory CSV (overrides config)");
  auto* c_label = app.add_subcommand("label", "detect, label, and filter lane changes");
  auto* c_featurize = app.add_subcommand("featurize", "evaluate context features");
  auto* c_train = app.add_subcommand("train", "train the decision forest");
  c_train->add_option("--instances", instances_override, "labeled feature CSV");
  auto* c_eval = app.add_subcommand("eval", "evaluate on the held-out vehicles");
  c_eval->add_option("--instances", instances_override, "labeled feature CSV");
  auto* c_sim = app.add_subcommand("simulate", "closed-loop ground-truth replay");
  c_sim->add_option("--ego", sim_args.ego_id, "ego vehicle id");
  c_sim->add_option("--start", sim_args.start, "start frame");
  c_sim->add_option("--end", sim_args.end, "end frame");
  auto* c_sweep = app.add_subcommand("sweep", "single-feature sensitivity curve");
  c_sweep->add_option("--feature", sweep_args.feature, "feature name (default x_FL)");
  c_sweep->add_option("--lo", sweep_args.lo, "sweep start");
  c_sweep->add_option("--hi", sweep_args.hi, "sweep end");
  c_sweep->add_option("--step", sweep_args.step, "sweep step");
  auto* c_all = app.add_subcommand("all", "run the whole pipeline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help passes through
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!cli.config_path.empty()) {
      cli.cfg = lanekit::RunConfig::from_file(cli.config_path);
    }
    if (seed_override) {
      cli.cfg.seed = *seed_override;
      cli.cfg.sync_derived();
    }
    if (!tracks_override.empty()) cli.cfg.tracks_path = tracks_override;
    fs::create_directories(cli.out_dir);

    if (c_synth->parsed()) run_synth(cli);
    if (c_ingest->parsed()) run_ingest(cli);
    if (c_label->parsed()) run_label(cli);
    if (c_featurize->parsed()) run_featurize(cli);
    if (c_train->parsed()) run_train(cli, instances_override);
    if (c_eval->parsed()) run_eval(cli, instances_override);
    if (c_sim->parsed()) run_simulate(cli, sim_args);
    if (c_sweep->parsed()) run_sweep(cli, sweep_args);
    if (c_all->parsed()) run_all(cli);
    return 0;
  } catch (const std::system_error& e) {
    write_json((fs::path(cli.out_dir) / "error_report.json").string(),
               json{{"error_type", "dependency"}, {"message", e.what()}});
    std::cerr << "error: " << e.what() << "\n";
    return kExitDependency;
  } catch (const lanekit::Error& e) {
    write_json((fs::path(cli.out_dir) / "error_report.json").string(),
               json{{"error_type", "validation"}, {"message", e.what()}});
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
