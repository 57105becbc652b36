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

#include "lanekit/manifest.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "lanekit/errors.hpp"
#include "nlohmann/json.hpp"

namespace lanekit {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot hash missing file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void Manifest::add_input(const std::string& path) {
  inputs.emplace_back(path, hash_hex(hash_file(path)));
}

void Manifest::write(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "lanekit-manifest";
  j["version"] = 1;
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  nlohmann::json in = nlohmann::json::array();
  for (const auto& [p, h] : inputs) in.push_back({{"path", p}, {"hash", h}});
  j["inputs"] = in;
  j["outputs"] = outputs;
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write manifest to " + path);
  out << j.dump(1) << '\n';
}

void write_run_sidecar(const std::string& path, const std::string& subcommand) {
  const auto now = std::chrono::system_clock::now();
  const auto epoch_s =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["unix_time"] = epoch_s;
  std::ofstream out(path);
  if (out) out << j.dump(1) << '\n';
}

}  // namespace lanekit
