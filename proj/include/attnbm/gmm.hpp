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

#ifndef ATTNBM_GMM_HPP
#define ATTNBM_GMM_HPP

#include <cstdint>

#include "attnbm/energy.hpp"
#include "attnbm/types.hpp"

namespace attnbm {

/// Isotropic Gaussian mixture: M components share one variance.
struct GaussianMixture {
  Vector weights;     // M, nonnegative, sums to 1
  Matrix means;       // M x N, one component mean per row
  double variance = 1.0;

  int components() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

/// Validates shapes, positivity and normalization (weights renormalized if
/// they deviate by less than 1e-12; larger deviations throw).
GaussianMixture make_mixture(Vector weights, Matrix means, double variance);

double gmm_log_density(const GaussianMixture& gmm, const Vector& v);
double gmm_density(const GaussianMixture& gmm, const Vector& v);

/// Draws n samples (rows) by ancestral sampling: component index from the
/// weight vector, then an isotropic Gaussian around its mean.
Matrix sample_mixture(const GaussianMixture& gmm, int n, Rng& rng);

/// The model density rewritten as a mixture of isotropic Gaussians.
/// Unit temperature gives one component per memory with unit variance;
/// integer temperatures beta enumerate all p^beta memory tuples, with
/// component means equal to tuple averages and variance 1/beta. Enumeration
/// is subject to `tuple_budget` (BudgetExceeded).
GaussianMixture to_gmm(const AttnBmModel& model,
                       std::int64_t tuple_budget = kDefaultTupleBudget);

/// Equivalent unit-temperature model on rescaled coordinates: the density
/// of `model` at v equals scale^(dim/2) times the density of `xi` (at
/// unit temperature) evaluated at sqrt(scale) * v.
struct ExpandedModel {
  MemoryMatrix xi;  // p^beta x N
  double scale;     // = beta
};

ExpandedModel expand_beta(const AttnBmModel& model,
                          std::int64_t tuple_budget = kDefaultTupleBudget);

/// Weights of the binary-hidden Gaussian-Bernoulli machine whose energy,
/// truncated to single-active-hidden configurations, reproduces the
/// attention model at unit temperature.
struct GbRbmWeights {
  Matrix w;  // hidden x visible; row j couples hidden unit j
};

GbRbmWeights gb_rbm_from_memories(const MemoryMatrix& xi);

/// Split of the Gaussian-Bernoulli unnormalized density at v into the
/// attention part (exactly one hidden unit active, plus the all-off term)
/// and the nonnegative remainder from multi-active configurations.
struct TruncationGap {
  double gb;            // sum over all 2^p hidden configurations
  double attention;     // single-active terms + all-off term
  double higher_order;  // gb - attention, >= 0
};

TruncationGap gb_truncation_gap(const GbRbmWeights& rbm, const Vector& v,
                                int max_hidden = 20);

}  // namespace attnbm

#endif  // ATTNBM_GMM_HPP
