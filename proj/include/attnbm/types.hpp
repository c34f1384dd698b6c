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

#ifndef ATTNBM_TYPES_HPP
#define ATTNBM_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace attnbm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Memory matrix: p x N, row mu holds the mu-th stored pattern.
using MemoryMatrix = Eigen::MatrixXd;

using Rng = std::mt19937_64;

enum class BetaKind { Integer, Real };

/// Attentional Boltzmann machine: memory matrix plus inverse temperature.
/// Integer-kind models must have beta equal to a positive integer exactly;
/// only those admit a closed-form partition function.
struct AttnBmModel {
  MemoryMatrix xi;
  double beta = 1.0;
  BetaKind beta_kind = BetaKind::Integer;

  int memories() const { return static_cast<int>(xi.rows()); }
  int dim() const { return static_cast<int>(xi.cols()); }
};

/// Validates invariants (finite entries, p >= 1, N >= 1).
void validate_memory(const MemoryMatrix& xi);

AttnBmModel make_integer_beta_model(MemoryMatrix xi, int beta);
AttnBmModel make_real_beta_model(MemoryMatrix xi, double beta);

}  // namespace attnbm

#endif  // ATTNBM_TYPES_HPP
