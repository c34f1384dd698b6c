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

#ifndef ATTNBM_CONFIG_HPP
#define ATTNBM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace attnbm {

/// Plain-text key=value settings with '#' comments. Later assignments and
/// explicit overrides win.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  /// Applies "key=value" strings (e.g. command-line --set entries).
  void apply_overrides(const std::vector<std::string>& overrides);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::int64_t get_i64(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Required variant: missing key raises.
  std::string require(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const {
    return values_;
  }

 private:
  void set_line(const std::string& line, int line_number = 0);
  std::map<std::string, std::string> values_;
};

}  // namespace attnbm

#endif  // ATTNBM_CONFIG_HPP
