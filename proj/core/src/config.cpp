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

#include "lanekit/config.hpp"

#include <fstream>
#include <sstream>

#include "lanekit/errors.hpp"
#include "lanekit/manifest.hpp"

namespace lanekit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

class IniView {
 public:
  explicit IniView(std::map<std::string, std::map<std::string, std::string>> values)
      : values_(std::move(values)) {}

  double num(const std::string& sec, const std::string& key, double fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    try {
      return std::stod(*v);
    } catch (...) {
      throw ParseError("config: non-numeric value for " + sec + "." + key + ": '" + *v + "'");
    }
  }
  long integer(const std::string& sec, const std::string& key, long fallback) const {
    return static_cast<long>(num(sec, key, static_cast<double>(fallback)));
  }
  bool flag(const std::string& sec, const std::string& key, bool fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ParseError("config: non-boolean value for " + sec + "." + key);
  }
  std::string text(const std::string& sec, const std::string& key,
                   const std::string& fallback) const {
    const std::string* v = find(sec, key);
    return v ? *v : fallback;
  }

 private:
  const std::string* find(const std::string& sec, const std::string& key) const {
    auto s = values_.find(sec);
    if (s == values_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }
  std::map<std::string, std::map<std::string, std::string>> values_;
};

void parse_noise4(const std::string& text, std::array<double, 4>& out) {
  std::stringstream ss(text);
  std::string tok;
  std::size_t i = 0;
  while (std::getline(ss, tok, ',') && i < 4) out[i++] = std::stod(trim(tok));
  if (i != 4) throw ParseError("config: expected 4 comma-separated variances");
}

void parse_noise2(const std::string& text, std::array<double, 2>& out) {
  std::stringstream ss(text);
  std::string tok;
  std::size_t i = 0;
  while (std::getline(ss, tok, ',') && i < 2) out[i++] = std::stod(trim(tok));
  if (i != 2) throw ParseError("config: expected 2 comma-separated variances");
}

std::string join4(const std::array<double, 4>& a) {
  std::ostringstream ss;
  ss << a[0] << "," << a[1] << "," << a[2] << "," << a[3];
  return ss.str();
}

std::string join2(const std::array<double, 2>& a) {
  std::ostringstream ss;
  ss << a[0] << "," << a[1];
  return ss.str();
}

}  // namespace

std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("config line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  IniView v(parse_ini(ss.str()));

  RunConfig c;
  c.seed = static_cast<std::uint64_t>(v.integer("run", "seed", static_cast<long>(c.seed)));

  c.tracks_path = v.text("data", "tracks", c.tracks_path);
  c.schema = v.text("data", "schema", c.schema);
  c.ts = v.num("data", "ts", c.ts);
  c.max_gap_fill = static_cast<int>(v.integer("data", "max_gap_fill", c.max_gap_fill));

  c.lanes = static_cast<int>(v.integer("road", "lanes", c.lanes));
  c.lane_width = v.num("road", "lane_width", c.lane_width);
  c.y_right_edge = v.num("road", "y_right_edge", c.y_right_edge);
  c.ramp_zones = v.text("road", "ramp_zones", c.ramp_zones);

  c.alpha = v.num("smoothing", "alpha", c.alpha);
  c.ekf.wheelbase = v.num("smoothing", "wheelbase", c.ekf.wheelbase);
  parse_noise4(v.text("smoothing", "process_noise", join4(c.ekf.process_noise)),
               c.ekf.process_noise);
  parse_noise2(v.text("smoothing", "measurement_noise", join2(c.ekf.measurement_noise)),
               c.ekf.measurement_noise);
  parse_noise4(v.text("smoothing", "initial_covariance", join4(c.ekf.initial_covariance)),
               c.ekf.initial_covariance);

  c.events.lat_speed_threshold =
      v.num("events", "lat_speed_threshold", c.events.lat_speed_threshold);
  c.events.headway_min = v.num("events", "headway_min", c.events.headway_min);
  c.events.ramp_margin = v.num("events", "ramp_margin", c.events.ramp_margin);
  c.events.merge_window = v.num("events", "merge_window", c.events.merge_window);
  c.events.min_run = v.num("events", "min_run", c.events.min_run);
  c.events.sensing_range = v.num("events", "sensing_range", c.events.sensing_range);
  c.events.keep_warmup = v.num("events", "keep_warmup", c.events.keep_warmup);
  c.events.keep_margin = v.num("events", "keep_margin", c.events.keep_margin);
  c.events.keep_per_event =
      static_cast<int>(v.integer("events", "keep_per_event", c.events.keep_per_event));

  c.features.sentinel_gap = v.num("features", "sentinel_gap", c.features.sentinel_gap);
  c.features.sentinel_rel_speed =
      v.num("features", "sentinel_rel_speed", c.features.sentinel_rel_speed);
  c.features.ttc_max = v.num("features", "ttc_max", c.features.ttc_max);
  c.features.sensing_range = v.num("features", "sensing_range", c.features.sensing_range);
  c.features.n_past = static_cast<int>(v.integer("features", "n_past", c.features.n_past));
  c.features.step_gap = static_cast<int>(v.integer("features", "step_gap", c.features.step_gap));

  c.forest.n_trees = static_cast<int>(v.integer("forest", "n_trees", c.forest.n_trees));
  c.forest.mtry = static_cast<int>(v.integer("forest", "mtry", c.forest.mtry));
  c.forest.bootstrap = v.flag("forest", "bootstrap", c.forest.bootstrap);
  c.forest.min_samples_split =
      static_cast<int>(v.integer("forest", "min_samples_split", c.forest.min_samples_split));
  c.forest.max_depth = static_cast<int>(v.integer("forest", "max_depth", c.forest.max_depth));
  c.holdout_frac = v.num("forest", "holdout_frac", c.holdout_frac);

  PlannerParams& p = c.sim.planner;
  p.horizon = static_cast<int>(v.integer("planner", "horizon", p.horizon));
  p.ts = v.num("planner", "ts", p.ts);
  p.wheelbase = v.num("planner", "wheelbase", p.wheelbase);
  p.q_y = v.num("planner", "q_y", p.q_y);
  p.q_psi = v.num("planner", "q_psi", p.q_psi);
  p.q_v = v.num("planner", "q_v", p.q_v);
  p.r_steer = v.num("planner", "r_steer", p.r_steer);
  p.r_accel = v.num("planner", "r_accel", p.r_accel);
  p.t_scale = v.num("planner", "t_scale", p.t_scale);
  p.x_bounds.psi.lo = v.num("planner", "psi_min", p.x_bounds.psi.lo);
  p.x_bounds.psi.hi = v.num("planner", "psi_max", p.x_bounds.psi.hi);
  p.x_bounds.v.lo = v.num("planner", "v_min", p.x_bounds.v.lo);
  p.x_bounds.v.hi = v.num("planner", "v_max", p.x_bounds.v.hi);
  p.u_bounds.steer.lo = v.num("planner", "steer_min", p.u_bounds.steer.lo);
  p.u_bounds.steer.hi = v.num("planner", "steer_max", p.u_bounds.steer.hi);
  p.u_bounds.accel.lo = v.num("planner", "accel_min", p.u_bounds.accel.lo);
  p.u_bounds.accel.hi = v.num("planner", "accel_max", p.u_bounds.accel.hi);
  p.target.v_pref = v.num("planner", "v_pref", p.target.v_pref);
  p.target.t_hw = v.num("planner", "t_hw", p.target.t_hw);
  p.target.gap_min = v.num("planner", "gap_min", p.target.gap_min);
  p.target.road_margin = v.num("planner", "road_margin", p.target.road_margin);
  p.target.side_margin = v.num("planner", "side_margin", p.target.side_margin);
  p.target.sensing_range = v.num("planner", "sensing_range", p.target.sensing_range);
  p.qp_max_iter = static_cast<int>(v.integer("planner", "qp_max_iter", p.qp_max_iter));
  p.qp_tol = v.num("planner", "qp_tol", p.qp_tol);
  p.v0_min = v.num("planner", "v0_min", p.v0_min);

  c.sim.threshold = v.num("sim", "threshold", c.sim.threshold);
  c.sim.completion_tol = v.num("sim", "completion_tol", c.sim.completion_tol);

  SynthConfig& s = c.synth;
  s.n_vehicles = static_cast<int>(v.integer("synth", "n_vehicles", s.n_vehicles));
  s.instances_per_vehicle =
      static_cast<int>(v.integer("synth", "instances_per_vehicle", s.instances_per_vehicle));
  s.label_noise = v.num("synth", "label_noise", s.label_noise);
  s.rule_delta_max = v.num("synth", "rule_delta_max", s.rule_delta_max);
  s.rule_x_fl_min = v.num("synth", "rule_x_fl_min", s.rule_x_fl_min);
  s.rule_ttc_rl_min = v.num("synth", "rule_ttc_rl_min", s.rule_ttc_rl_min);
  s.rule_x_rl_min = v.num("synth", "rule_x_rl_min", s.rule_x_rl_min);
  s.n_episodes = static_cast<int>(v.integer("synth", "n_episodes", s.n_episodes));
  s.episode_duration = v.num("synth", "episode_duration", s.episode_duration);
  c.sync_derived();
  return c;
}

void RunConfig::sync_derived() {
  forest.seed = seed;
  synth.seed = seed;
  synth.ts = ts;
  synth.lanes = lanes;
  synth.lane_width = lane_width;
}

std::string RunConfig::to_ini() const {
  std::ostringstream o;
  o.precision(17);
  o << "[run]\n"
    << "seed = " << seed << "\n\n";
  o << "[data]\n"
    << "tracks = " << tracks_path << "\n"
    << "schema = " << schema << "\n"
    << "ts = " << ts << "\n"
    << "max_gap_fill = " << max_gap_fill << "\n\n";
  o << "[road]\n"
    << "lanes = " << lanes << "\n"
    << "lane_width = " << lane_width << "\n"
    << "y_right_edge = " << y_right_edge << "\n"
    << "ramp_zones = " << ramp_zones << "\n\n";
  o << "[smoothing]\n"
    << "alpha = " << alpha << "\n"
    << "wheelbase = " << ekf.wheelbase << "\n"
    << "process_noise = " << join4(ekf.process_noise) << "\n"
    << "measurement_noise = " << join2(ekf.measurement_noise) << "\n"
    << "initial_covariance = " << join4(ekf.initial_covariance) << "\n\n";
  o << "[events]\n"
    << "lat_speed_threshold = " << events.lat_speed_threshold << "\n"
    << "headway_min = " << events.headway_min << "\n"
    << "ramp_margin = " << events.ramp_margin << "\n"
    << "merge_window = " << events.merge_window << "\n"
    << "min_run = " << events.min_run << "\n"
    << "sensing_range = " << events.sensing_range << "\n"
    << "keep_warmup = " << events.keep_warmup << "\n"
    << "keep_margin = " << events.keep_margin << "\n"
    << "keep_per_event = " << events.keep_per_event << "\n\n";
  o << "[features]\n"
    << "sentinel_gap = " << features.sentinel_gap << "\n"
    << "sentinel_rel_speed = " << features.sentinel_rel_speed << "\n"
    << "ttc_max = " << features.ttc_max << "\n"
    << "sensing_range = " << features.sensing_range << "\n"
    << "n_past = " << features.n_past << "\n"
    << "step_gap = " << features.step_gap << "\n\n";
  o << "[forest]\n"
    << "n_trees = " << forest.n_trees << "\n"
    << "mtry = " << forest.mtry << "\n"
    << "bootstrap = " << (forest.bootstrap ? "true" : "false") << "\n"
    << "min_samples_split = " << forest.min_samples_split << "\n"
    << "max_depth = " << forest.max_depth << "\n"
    << "holdout_frac = " << holdout_frac << "\n\n";
  const PlannerParams& p = sim.planner;
  o << "[planner]\n"
    << "horizon = " << p.horizon << "\n"
    << "ts = " << p.ts << "\n"
    << "wheelbase = " << p.wheelbase << "\n"
    << "q_y = " << p.q_y << "\n"
    << "q_psi = " << p.q_psi << "\n"
    << "q_v = " << p.q_v << "\n"
    << "r_steer = " << p.r_steer << "\n"
    << "r_accel = " << p.r_accel << "\n"
    << "t_scale = " << p.t_scale << "\n"
    << "psi_min = " << p.x_bounds.psi.lo << "\n"
    << "psi_max = " << p.x_bounds.psi.hi << "\n"
    << "v_min = " << p.x_bounds.v.lo << "\n"
    << "v_max = " << p.x_bounds.v.hi << "\n"
    << "steer_min = " << p.u_bounds.steer.lo << "\n"
    << "steer_max = " << p.u_bounds.steer.hi << "\n"
    << "accel_min = " << p.u_bounds.accel.lo << "\n"
    << "accel_max = " << p.u_bounds.accel.hi << "\n"
    << "v_pref = " << p.target.v_pref << "\n"
    << "t_hw = " << p.target.t_hw << "\n"
    << "gap_min = " << p.target.gap_min << "\n"
    << "road_margin = " << p.target.road_margin << "\n"
    << "side_margin = " << p.target.side_margin << "\n"
    << "sensing_range = " << p.target.sensing_range << "\n"
    << "qp_max_iter = " << p.qp_max_iter << "\n"
    << "qp_tol = " << p.qp_tol << "\n"
    << "v0_min = " << p.v0_min << "\n\n";
  o << "[sim]\n"
    << "threshold = " << sim.threshold << "\n"
    << "completion_tol = " << sim.completion_tol << "\n\n";
  o << "[synth]\n"
    << "n_vehicles = " << synth.n_vehicles << "\n"
    << "instances_per_vehicle = " << synth.instances_per_vehicle << "\n"
    << "label_noise = " << synth.label_noise << "\n"
    << "rule_delta_max = " << synth.rule_delta_max << "\n"
    << "rule_x_fl_min = " << synth.rule_x_fl_min << "\n"
    << "rule_ttc_rl_min = " << synth.rule_ttc_rl_min << "\n"
    << "rule_x_rl_min = " << synth.rule_x_rl_min << "\n"
    << "n_episodes = " << synth.n_episodes << "\n"
    << "episode_duration = " << synth.episode_duration << "\n";
  return o.str();
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write config to " + path);
  out << to_ini();
}

RoadGeometry RunConfig::road() const {
  RoadGeometry r = RoadGeometry::uniform(lanes, lane_width, y_right_edge);
  if (!ramp_zones.empty()) {
    std::stringstream ss(ramp_zones);
    std::string zone;
    while (std::getline(ss, zone, ';')) {
      const std::size_t colon = zone.find(':');
      if (colon == std::string::npos) throw ParseError("config: ramp zone needs lo:hi");
      r.ramp_zones.push_back(
          {std::stod(zone.substr(0, colon)), std::stod(zone.substr(colon + 1))});
    }
  }
  return r;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(to_ini()); }

}  // namespace lanekit
