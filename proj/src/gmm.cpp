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

#include "attnbm/gmm.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "attnbm/errors.hpp"

namespace attnbm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

int integer_beta_or_throw(const AttnBmModel& model) {
  if (model.beta_kind != BetaKind::Integer) {
    throw UnsupportedBeta(
        "mixture form requires an integer temperature parameter");
  }
  const double rounded = std::round(model.beta);
  if (std::abs(model.beta - rounded) > 0.0 || rounded < 1.0) {
    throw std::domain_error("mixture form: beta must be a positive integer");
  }
  return static_cast<int>(rounded);
}
}  // namespace

GaussianMixture make_mixture(Vector weights, Matrix means, double variance) {
  if (means.rows() < 1 || means.cols() < 1) {
    throw std::invalid_argument("make_mixture: need at least one component");
  }
  if (weights.size() != means.rows()) {
    throw std::invalid_argument("make_mixture: weight/mean count mismatch");
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("make_mixture: variance must be positive");
  }
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw std::invalid_argument("make_mixture: weights must be nonnegative");
  }
  if (!means.allFinite()) {
    throw std::invalid_argument("make_mixture: means must be finite");
  }
  const double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("make_mixture: weights must sum to one");
  }
  weights /= total;
  GaussianMixture gmm;
  gmm.weights = std::move(weights);
  gmm.means = std::move(means);
  gmm.variance = variance;
  return gmm;
}

double gmm_log_density(const GaussianMixture& gmm, const Vector& v) {
  if (v.size() != gmm.dim()) {
    throw std::invalid_argument("gmm_log_density: dimension mismatch");
  }
  const int m = gmm.components();
  const double n = static_cast<double>(gmm.dim());
  const double log_norm = -0.5 * n * std::log(kTwoPi * gmm.variance);
  Vector logs(m);
  for (int k = 0; k < m; ++k) {
    const double d2 = (v - gmm.means.row(k).transpose()).squaredNorm();
    logs[k] = std::log(gmm.weights[k]) - 0.5 * d2 / gmm.variance;
  }
  return log_norm + log_sum_exp(logs);
}

double gmm_density(const GaussianMixture& gmm, const Vector& v) {
  return std::exp(gmm_log_density(gmm, v));
}

Matrix sample_mixture(const GaussianMixture& gmm, int n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample_mixture: negative count");
  std::discrete_distribution<int> pick(gmm.weights.data(),
                                       gmm.weights.data() + gmm.weights.size());
  std::normal_distribution<double> gauss(0.0, std::sqrt(gmm.variance));
  Matrix out(n, gmm.dim());
  for (int i = 0; i < n; ++i) {
    const int k = pick(rng);
    for (int j = 0; j < gmm.dim(); ++j) {
      out(i, j) = gmm.means(k, j) + gauss(rng);
    }
  }
  return out;
}

GaussianMixture to_gmm(const AttnBmModel& model, std::int64_t tuple_budget) {
  validate_memory(model.xi);
  const int k = integer_beta_or_throw(model);
  const int p = model.memories();
  const int n = model.dim();
  if (k == 1) {
    Vector half_norms(p);
    for (int mu = 0; mu < p; ++mu) {
      half_norms[mu] = 0.5 * model.xi.row(mu).squaredNorm();
    }
    GaussianMixture gmm;
    gmm.weights = softmax(half_norms);
    gmm.means = model.xi;
    gmm.variance = 1.0;
    return gmm;
  }
  const std::int64_t count = checked_tuple_count(p, k, tuple_budget);
  const double beta = static_cast<double>(k);
  Vector log_w(count);
  Matrix means(count, n);
  std::int64_t idx = 0;
  visit_memory_tuples(model.xi, k, [&](const std::vector<int>&,
                                       const Vector& sum) {
    log_w[idx] = sum.squaredNorm() / (2.0 * beta);
    means.row(idx) = sum.transpose() / beta;
    ++idx;
  });
  GaussianMixture gmm;
  gmm.weights = softmax(log_w);
  gmm.means = std::move(means);
  gmm.variance = 1.0 / beta;
  return gmm;
}

ExpandedModel expand_beta(const AttnBmModel& model, std::int64_t tuple_budget) {
  validate_memory(model.xi);
  const int k = integer_beta_or_throw(model);
  const int p = model.memories();
  const int n = model.dim();
  const std::int64_t count = checked_tuple_count(p, k, tuple_budget);
  const double beta = static_cast<double>(k);
  const double root = std::sqrt(beta);
  MemoryMatrix expanded(count, n);
  std::int64_t idx = 0;
  visit_memory_tuples(model.xi, k, [&](const std::vector<int>&,
                                       const Vector& sum) {
    expanded.row(idx) = sum.transpose() / root;
    ++idx;
  });
  return {std::move(expanded), beta};
}

GbRbmWeights gb_rbm_from_memories(const MemoryMatrix& xi) {
  validate_memory(xi);
  return {xi};
}

TruncationGap gb_truncation_gap(const GbRbmWeights& rbm, const Vector& v,
                                int max_hidden) {
  const int p = static_cast<int>(rbm.w.rows());
  if (v.size() != rbm.w.cols()) {
    throw std::invalid_argument("gb_truncation_gap: dimension mismatch");
  }
  if (p > max_hidden) {
    throw BudgetExceeded("gb_truncation_gap: too many hidden units");
  }
  const double gauss = std::exp(-0.5 * v.squaredNorm());
  // exp(w_mu . v), computed once and reused so that the single-hidden
  // identity holds bitwise.
  Vector t(p);
  for (int mu = 0; mu < p; ++mu) {
    t[mu] = std::exp(rbm.w.row(mu).dot(v));
  }
  // Sum over hidden configurations factorizes: prod_mu (1 + t_mu).
  double product = 1.0;
  for (int mu = 0; mu < p; ++mu) product *= 1.0 + t[mu];
  const double gb = gauss * product;
  const double attention = gauss * (1.0 + t.sum());
  return {gb, attention, gb - attention};
}

}  // namespace attnbm
