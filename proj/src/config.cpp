// Copyright 2026 The AttnBM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attnbm/config.hpp"

#include <fstream>
#include <stdexcept>

#include "attnbm/errors.hpp"

namespace attnbm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void Config::set_line(const std::string& raw, int line_number) {
  std::string line = raw;
  const auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw FormatError("config: expected key=value at line " +
                          std::to_string(line_number),
                      0);
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) {
    throw FormatError("config: empty key at line " +
                          std::to_string(line_number),
                      0);
  }
  values_[key] = value;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot open " + path, 0);
  Config cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) cfg.set_line(line, ++number);
  return cfg;
}

void Config::apply_overrides(const std::vector<std::string>& overrides) {
  for (const std::string& entry : overrides) set_line(entry);
}

bool Config::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw std::invalid_argument("config: missing required key '" + key + "'");
  }
  return it->second;
}

namespace {

template <class T, class Parse>
T parse_or(const Config& cfg, const std::string& key, T fallback,
           Parse parse) {
  if (!cfg.has(key)) return fallback;
  const std::string text = cfg.get_string(key, "");
  try {
    std::size_t used = 0;
    T value = parse(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return value;
  } catch (const std::exception&) {
    throw FormatError("config: bad value for '" + key + "': " + text, 0);
  }
}

}  // namespace

int Config::get_int(const std::string& key, int fallback) const {
  return parse_or<int>(*this, key, fallback,
                       [](const std::string& s, std::size_t* used) {
                         return std::stoi(s, used);
                       });
}

std::int64_t Config::get_i64(const std::string& key,
                             std::int64_t fallback) const {
  return parse_or<std::int64_t>(*this, key, fallback,
                                [](const std::string& s, std::size_t* used) {
                                  return std::stoll(s, used);
                                });
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  return parse_or<std::uint64_t>(*this, key, fallback,
                                 [](const std::string& s, std::size_t* used) {
                                   return std::stoull(s, used);
                                 });
}

double Config::get_double(const std::string& key, double fallback) const {
  return parse_or<double>(*this, key, fallback,
                          [](const std::string& s, std::size_t* used) {
                            return std::stod(s, used);
                          });
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string text = get_string(key, "");
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    return false;
  }
  throw FormatError("config: bad boolean for '" + key + "': " + text, 0);
}

}  // namespace attnbm
