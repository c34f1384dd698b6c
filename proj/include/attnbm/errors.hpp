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

#ifndef ATTNBM_ERRORS_HPP
#define ATTNBM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attnbm {

/// Thrown when an enumeration (p^beta tuples, 2^{N_h} subsets) would exceed
/// the configured term budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an exact closed form is requested for a real-valued beta.
class UnsupportedBeta : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// File-format violation carrying the byte offset where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " +
                           std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace attnbm

#endif  // ATTNBM_ERRORS_HPP
