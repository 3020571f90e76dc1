/*
 * Copyright 2026 the kgcert authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KGCERT_MANIFEST_HPP_
#define KGCERT_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace kgcert {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a content fingerprint, for detecting silent data drift between runs.
uint64_t fingerprint_bytes(const void* data, size_t size);
uint64_t fingerprint_file(const std::filesystem::path& path);
std::string fingerprint_hex(uint64_t fingerprint);

// Every command writes one of these next to its outputs. The `determinism
// key` (command, resolved config minus execution-only keys, input
// fingerprints, tool version) identifies a run: two runs with equal keys
// produce byte-identical numeric outputs. Timing and output lists sit
// outside the key.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> resolved_config;
  std::map<std::string, std::string> input_fingerprints;  // label -> hex
  std::vector<std::string> outputs;
  std::string started_at;  // ISO 8601, UTC
  double wall_time_s = 0.0;

  // Keys that affect execution but never the numbers.
  static bool execution_only_key(const std::string& key);

  std::string determinism_key() const;
  void write(const std::filesystem::path& path) const;
};

std::string current_utc_timestamp();

}  // namespace kgcert

#endif  // KGCERT_MANIFEST_HPP_
