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

#include "attnbm/vmf.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace attnbm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSeriesAsymptoticSwitch = 30.0;

void check_bessel_args(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("bessel_i: need nu >= 0 and x >= 0");
  }
}

// Power series sum_k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)); leading term via
// lgamma, successive terms by ratio, stopping at relative 1e-15.
double bessel_series(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double q = 0.25 * x * x;
  double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (term < 1e-15 * sum) break;
  }
  return sum;
}

// Asymptotic expansion of exp(-x) I_nu(x) for large x:
// (2 pi x)^(-1/2) [1 - (mu-1)/(8x) + (mu-1)(mu-9)/(2!(8x)^2) - ...],
// mu = 4 nu^2. Terms are added while they keep shrinking.
double bessel_asymptotic_scaled(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::abs(term);
  for (int k = 1; k < 40; ++k) {
    const double factor =
        (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * x * k);
    term *= -factor;
    if (std::abs(term) >= prev) break;  // divergent tail reached
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum / std::sqrt(kTwoPi * x);
}

}  // namespace

double bessel_i(double nu, double x) {
  check_bessel_args(nu, x);
  if (x <= kSeriesAsymptoticSwitch) return bessel_series(nu, x);
  return std::exp(x) * bessel_asymptotic_scaled(nu, x);
}

double bessel_i_scaled(double nu, double x) {
  check_bessel_args(nu, x);
  if (x <= kSeriesAsymptoticSwitch) {
    return std::exp(-x) * bessel_series(nu, x);
  }
  return bessel_asymptotic_scaled(nu, x);
}

double log_bessel_i(double nu, double x) {
  check_bessel_args(nu, x);
  if (x <= kSeriesAsymptoticSwitch) {
    const double s = bessel_series(nu, x);
    if (s == 0.0) {
      throw std::domain_error("log_bessel_i: I_nu(0) = 0 for nu > 0");
    }
    return std::log(s);
  }
  return x + std::log(bessel_asymptotic_scaled(nu, x));
}

double VmfParams::concentration() const { return beta * eta.norm(); }

Vector VmfParams::mean_direction() const {
  const double norm = eta.norm();
  if (norm == 0.0) {
    throw std::domain_error("mean_direction: undefined for eta = 0");
  }
  return eta / norm;
}

bool VmfParams::is_uniform() const { return eta.norm() == 0.0; }

VmfParams vmf_from_memory(const MemoryMatrix& xi, double beta) {
  validate_memory(xi);
  if (!(beta > 0.0)) {
    throw std::invalid_argument("vmf_from_memory: beta must be positive");
  }
  VmfParams params;
  params.eta = xi.colwise().sum().transpose();
  params.beta = beta;
  return params;
}

double energy_c(const Vector& v, const MemoryMatrix& xi) {
  if (v.size() != xi.cols()) {
    throw std::invalid_argument("energy_c: dimension mismatch");
  }
  const double norm = v.norm();
  if (norm == 0.0) {
    throw std::domain_error("energy_c: direction undefined at v = 0");
  }
  const Vector eta = xi.colwise().sum().transpose();
  return -eta.dot(v) / norm;
}

double log_unit_sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("log_unit_sphere_area: need d >= 1");
  return std::log(2.0) + 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d);
}

double vmf_log_density(const Vector& u, const VmfParams& params) {
  const int d = params.dim();
  if (d < 2) throw std::invalid_argument("vmf_log_density: need dim >= 2");
  if (u.size() != d) {
    throw std::invalid_argument("vmf_log_density: dimension mismatch");
  }
  if (std::abs(u.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("vmf_log_density: input must be unit length");
  }
  const double kappa = params.concentration();
  if (kappa == 0.0) return -log_unit_sphere_area(d);
  const double half_d = 0.5 * d;
  const double log_norm = (half_d - 1.0) * std::log(kappa) -
                          half_d * std::log(kTwoPi) -
                          log_bessel_i(half_d - 1.0, kappa);
  return kappa * params.mean_direction().dot(u) + log_norm;
}

namespace {

Vector uniform_sphere(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) z[i] = gauss(rng);
    norm = z.norm();
  } while (norm < 1e-12);
  return z / norm;
}

// Rejection sampler for the polar coordinate w = mu . u of a unit-mean
// sample, via the Beta envelope on the tangent-normal decomposition.
double sample_polar(double kappa, int d, Rng& rng) {
  const double m = static_cast<double>(d - 1);
  const double b =
      (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m * m)) / m;
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + m * std::log(1.0 - x0 * x0);
  std::gamma_distribution<double> gamma_half(0.5 * m, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double g1 = gamma_half(rng);
    const double g2 = gamma_half(rng);
    const double z = g1 / (g1 + g2);  // Beta(m/2, m/2)
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = unit(rng);
    if (kappa * w + m * std::log(1.0 - x0 * w) - c >= std::log(u)) return w;
  }
}

}  // namespace

Matrix vmf_sample(const VmfParams& params, int n, Rng& rng) {
  const int d = params.dim();
  if (d < 2) throw std::invalid_argument("vmf_sample: need dim >= 2");
  if (n < 1) throw std::invalid_argument("vmf_sample: need n >= 1");
  Matrix out(n, d);
  const double kappa = params.concentration();
  if (kappa == 0.0) {
    for (int i = 0; i < n; ++i) out.row(i) = uniform_sphere(d, rng).transpose();
    return out;
  }
  const Vector mu = params.mean_direction();
  for (int i = 0; i < n; ++i) {
    const double w = sample_polar(kappa, d, rng);
    // Uniform tangent direction orthogonal to mu.
    Vector t;
    double norm = 0.0;
    do {
      t = uniform_sphere(d, rng);
      t -= t.dot(mu) * mu;
      norm = t.norm();
    } while (norm < 1e-12);
    t /= norm;
    Vector sample = w * mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * t;
    out.row(i) = (sample / sample.norm()).transpose();
  }
  return out;
}

double mean_resultant_length(const Matrix& samples) {
  if (samples.rows() < 1) {
    throw std::invalid_argument("mean_resultant_length: empty sample set");
  }
  return samples.colwise().mean().norm();
}

}  // namespace attnbm
