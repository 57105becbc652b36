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

#ifndef LANEKIT_MANIFEST_HPP
#define LANEKIT_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace lanekit {

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t hash_file(const std::string& path);  // throws SchemaError if unreadable
std::string hash_hex(std::uint64_t h);

/// Reproducibility record written next to every subcommand's outputs.
/// Deterministic content only; wall-clock data goes to the sidecar.
struct Manifest {
  std::string subcommand;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  ///< path, hash
  std::vector<std::string> outputs;

  void add_input(const std::string& path);
  void write(const std::string& path) const;
};

/// Non-deterministic run info (timestamp), kept out of the manifest so
/// reruns stay byte-identical.
void write_run_sidecar(const std::string& path, const std::string& subcommand);

}  // namespace lanekit

#endif  // LANEKIT_MANIFEST_HPP
