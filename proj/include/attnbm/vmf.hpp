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

#ifndef ATTNBM_VMF_HPP
#define ATTNBM_VMF_HPP

#include "attnbm/types.hpp"

namespace attnbm {

/// Directional model parameters: eta is the column sum of the memory
/// matrix; the density on the unit sphere has mean direction eta/||eta||
/// and concentration beta*||eta||. eta = 0 degenerates to the uniform
/// distribution on the sphere.
struct VmfParams {
  Vector eta;
  double beta = 1.0;

  int dim() const { return static_cast<int>(eta.size()); }
  double concentration() const;       // beta * ||eta||
  Vector mean_direction() const;      // eta / ||eta||; throws when eta = 0
  bool is_uniform() const;            // ||eta|| == 0
};

VmfParams vmf_from_memory(const MemoryMatrix& xi, double beta = 1.0);

/// Directional energy -eta . v / ||v||; scale-invariant in v.
double energy_c(const Vector& v, const MemoryMatrix& xi);

/// Modified Bessel function of the first kind I_nu(x), nu >= 0, x >= 0.
/// Power series with term-ratio stopping (rel. 1e-15); for x > 30 a
/// uniform asymptotic expansion takes over.
double bessel_i(double nu, double x);
/// exp(-x) * I_nu(x): overflow-safe for large arguments.
double bessel_i_scaled(double nu, double x);
/// log I_nu(x), valid for arguments where I_nu overflows a double.
double log_bessel_i(double nu, double x);

/// Surface area of the unit sphere S^{d-1} embedded in R^d, as a log.
double log_unit_sphere_area(int d);

/// Normalized log density at a unit vector (checked to 1e-9):
/// kappa * (mu . u) + (d/2-1) log kappa - (d/2) log(2 pi) - log I_{d/2-1}.
double vmf_log_density(const Vector& u, const VmfParams& params);

/// n unit-vector samples (rows), drawn by the tangent-normal decomposition
/// with a rejection step for the polar coordinate.
Matrix vmf_sample(const VmfParams& params, int n, Rng& rng);

/// Norm of the sample mean; converges to I_{d/2}(kappa)/I_{d/2-1}(kappa).
double mean_resultant_length(const Matrix& samples);

}  // namespace attnbm

#endif  // ATTNBM_VMF_HPP
