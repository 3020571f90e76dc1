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

#include "kgcert/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "kgcert/kg.hpp"

namespace kgcert {

uint64_t fingerprint_bytes(const void* data, size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  uint64_t hash = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

uint64_t fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file for fingerprinting: " + path.string());
  uint64_t hash = 0xcbf29ce484222325ull;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof(buffer));
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ull;
    }
  }
  return hash;
}

std::string fingerprint_hex(uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fingerprint));
  return buf;
}

bool RunManifest::execution_only_key(const std::string& key) {
  return key == "threads" || key == "out_dir";
}

std::string RunManifest::determinism_key() const {
  std::string text = "tool=kgcert/" + std::string(kToolVersion) + "\n";
  text += "command=" + command + "\n";
  for (const auto& [key, value] : resolved_config) {
    if (execution_only_key(key)) continue;
    text += key + "=" + value + "\n";
  }
  for (const auto& [label, fingerprint] : input_fingerprints) {
    text += "input." + label + "=" + fingerprint + "\n";
  }
  return fingerprint_hex(fingerprint_bytes(text.data(), text.size()));
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::ordered_json doc;
  doc["tool"] = "kgcert";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["determinism_key"] = determinism_key();
  doc["resolved_config"] = resolved_config;
  doc["input_fingerprints"] = input_fingerprints;
  doc["outputs"] = outputs;
  doc["started_at"] = started_at;
  doc["wall_time_s"] = wall_time_s;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest: " + path.string());
  out << doc.dump(2) << '\n';
}

std::string current_utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace kgcert
