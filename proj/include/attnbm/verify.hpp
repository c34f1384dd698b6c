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

#ifndef ATTNBM_VERIFY_HPP
#define ATTNBM_VERIFY_HPP

#include <string>
#include <vector>

namespace attnbm {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // worst deviation or failure reason
};

/// Fast sweep of numerical cross-checks pitting every analytic formula in
/// the library against an independent oracle (adaptive quadrature, central
/// finite differences, closed forms, direct enumeration).
std::vector<CheckResult> run_verification(std::uint64_t seed = 20260821);

}  // namespace attnbm

#endif  // ATTNBM_VERIFY_HPP
