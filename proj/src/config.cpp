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

#include "kgcert/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kgcert {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": expected `key = value`");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
    }
    config.values_[key] = trim(stripped.substr(eq + 1));
  }
  return config;
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must have the form key=value: " + assignment);
  }
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) {
    throw ConfigError("missing required config key: " + key);
  }
  return it->second;
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    const int64_t value = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key `" + key + "`: expected integer, got `" +
                      it->second + "`");
  }
}

uint64_t KeyValueConfig::get_uint(const std::string& key, uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    const uint64_t value = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key `" + key + "`: expected unsigned integer, got `" +
                      it->second + "`");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    const double value = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key `" + key + "`: expected number, got `" + it->second +
                      "`");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key `" + key + "`: expected true/false, got `" +
                    it->second + "`");
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> values;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string stripped = trim(item);
    if (stripped.empty()) continue;
    try {
      size_t pos = 0;
      values.push_back(std::stod(stripped, &pos));
      if (pos != stripped.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("config key `" + key + "`: expected comma-separated numbers");
    }
  }
  return values;
}

void KeyValueConfig::check_known_keys(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

std::string KeyValueConfig::render() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace kgcert
