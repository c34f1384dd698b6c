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

#ifndef ATTNBM_ENERGY_HPP
#define ATTNBM_ENERGY_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "attnbm/errors.hpp"
#include "attnbm/types.hpp"

namespace attnbm {

inline constexpr std::size_t kDefaultTupleBudget = 10'000'000;

/// log sum_i exp(x_i), max-shifted so it never overflows after the shift.
double log_sum_exp(const Vector& x);

/// exp(x_i - max) / sum, invariant under adding a constant to all entries.
Vector softmax(const Vector& x);

/// E_B(v) = 0.5*||v||^2 - log sum_mu exp(xi_mu . v).
double energy_b(const Vector& v, const MemoryMatrix& xi);

/// Number of ordered memory tuples p^k, throwing BudgetExceeded past `budget`.
std::size_t checked_tuple_count(Eigen::Index p, int k, std::size_t budget);

/// Visits every ordered tuple (mu_1..mu_k), mu in [0,p), in lexicographic
/// order. fn(digits, row_sum) receives the tuple indices and the sum of the
/// corresponding memory rows. Partial sums are kept per level, so the walk
/// allocates nothing inside the loop.
template <class Fn>
void visit_memory_tuples(const MemoryMatrix& xi, int k, Fn&& fn) {
  const int p = static_cast<int>(xi.rows());
  std::vector<int> digits(static_cast<std::size_t>(k), 0);
  std::vector<Vector> partial(static_cast<std::size_t>(k) + 1,
                              Vector::Zero(xi.cols()));
  auto rec = [&](auto&& self, int level) -> void {
    if (level == k) {
      fn(digits, partial[static_cast<std::size_t>(k)]);
      return;
    }
    for (int mu = 0; mu < p; ++mu) {
      digits[static_cast<std::size_t>(level)] = mu;
      partial[static_cast<std::size_t>(level) + 1] =
          partial[static_cast<std::size_t>(level)] + xi.row(mu).transpose();
      self(self, level + 1);
    }
  };
  rec(rec, 0);
}

/// log Z for integer beta: (N/2) log(2 pi / beta)
///   + log sum over p^beta tuples of exp(||sum_k xi_{mu_k}||^2 / (2 beta)).
/// Throws UnsupportedBeta for real-valued beta and BudgetExceeded when the
/// tuple enumeration would exceed `tuple_budget`.
double log_partition(const AttnBmModel& model,
                     std::size_t tuple_budget = kDefaultTupleBudget);

/// -beta * E_B(v) - log Z.
double log_likelihood(const Vector& v, const AttnBmModel& model,
                      std::size_t tuple_budget = kDefaultTupleBudget);

/// d E_B / d xi_{mu,i} = -v_i * softmax(xi v)_mu, returned as p x N.
Matrix grad_energy_b(const Vector& v, const MemoryMatrix& xi);

/// d log Z / d xi, exact for integer beta (p x N).
Matrix grad_log_partition(const AttnBmModel& model,
                          std::size_t tuple_budget = kDefaultTupleBudget);

/// Exact gradient of the mean negative log-likelihood over a batch
/// (rows of `batch` are samples): beta * mean(grad_energy_b) + grad_log_Z.
Matrix grad_nll(const Matrix& batch, const AttnBmModel& model,
                std::size_t tuple_budget = kDefaultTupleBudget);

/// Upper bound on log Z for beta > 1:
///   (beta-1) log p + (N/2) log(2 pi / beta) + log sum_mu exp(beta ||xi_mu||^2 / 2).
/// Throws std::domain_error for beta <= 1.
double jensen_log_partition_bound(const AttnBmModel& model);

}  // namespace attnbm

#endif  // ATTNBM_ENERGY_HPP
