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

#ifndef KGCERT_CONFIG_HPP_
#define KGCERT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgcert/kg.hpp"

namespace kgcert {

// Flat `key = value` configuration. Lines starting with '#' are comments.
// Keys are dotted lowercase identifiers; values are free text, trimmed.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_string(const std::string& text);

  // Applies a `key=value` override (CLI form).
  void apply_override(const std::string& assignment);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  uint64_t get_uint(const std::string& key, uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  // Marks keys this command understands; unknown keys are validation errors.
  void check_known_keys(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  // Canonical `key = value` rendering with sorted keys.
  std::string render() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace kgcert

#endif  // KGCERT_CONFIG_HPP_
