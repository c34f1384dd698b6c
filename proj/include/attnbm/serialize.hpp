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

#ifndef ATTNBM_SERIALIZE_HPP
#define ATTNBM_SERIALIZE_HPP

#include <string>

#include "attnbm/efh.hpp"
#include "attnbm/gmm.hpp"
#include "attnbm/types.hpp"

namespace attnbm {

/// Flat binary model file: magic "ABM1", little-endian u32 memory count,
/// u32 dimension, f64 beta, u8 beta kind (0 = integer, 1 = real), then the
/// memory entries as little-endian f64 in row-major order.
void save_model(const AttnBmModel& model, const std::string& path);
AttnBmModel load_model(const std::string& path);

/// Same container style with tag "EFH1" and an extended header carrying the
/// two Lagrangian presets (kind byte + power).
void save_efh(const EfhSpec& spec, const std::string& path);
EfhSpec load_efh(const std::string& path);

/// Plain text: header "M N variance", then M lines
/// "weight mean_1 ... mean_N", 17 significant digits.
void save_mixture(const GaussianMixture& gmm, const std::string& path);
GaussianMixture load_mixture(const std::string& path);

}  // namespace attnbm

#endif  // ATTNBM_SERIALIZE_HPP
