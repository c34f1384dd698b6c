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

#include "attnbm/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace attnbm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_dims(const Vector& v, const MemoryMatrix& xi) {
  if (xi.cols() != v.size()) {
    throw std::invalid_argument("visible dimension mismatch: expected " +
                                std::to_string(xi.cols()) + ", got " +
                                std::to_string(v.size()));
  }
}

int integer_beta_or_throw(const AttnBmModel& model) {
  if (model.beta_kind != BetaKind::Integer) {
    throw UnsupportedBeta(
        "closed-form partition requires integer beta; "
        "use jensen_log_partition_bound for real beta");
  }
  const double rounded = std::round(model.beta);
  if (model.beta <= 0.0 || rounded != model.beta) {
    throw std::domain_error("integer-beta model must have beta in {1,2,...}");
  }
  return static_cast<int>(rounded);
}

}  // namespace

void validate_memory(const MemoryMatrix& xi) {
  if (xi.rows() < 1 || xi.cols() < 1) {
    throw std::invalid_argument("memory matrix must be at least 1x1");
  }
  if (!xi.allFinite()) {
    throw std::invalid_argument("memory matrix has non-finite entries");
  }
}

AttnBmModel make_integer_beta_model(MemoryMatrix xi, int beta) {
  validate_memory(xi);
  if (beta < 1) throw std::domain_error("integer beta must be >= 1");
  return AttnBmModel{std::move(xi), static_cast<double>(beta),
                     BetaKind::Integer};
}

AttnBmModel make_real_beta_model(MemoryMatrix xi, double beta) {
  validate_memory(xi);
  if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
  return AttnBmModel{std::move(xi), beta, BetaKind::Real};
}

double log_sum_exp(const Vector& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("log_sum_exp of empty vector");
  }
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) {
    throw std::invalid_argument("log_sum_exp input has non-finite entries");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::exp(x[i] - m);
  return m + std::log(acc);
}

Vector softmax(const Vector& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("softmax of empty vector");
  }
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) {
    throw std::invalid_argument("softmax input has non-finite entries");
  }
  Vector out = (x.array() - m).exp();
  out /= out.sum();
  return out;
}

double energy_b(const Vector& v, const MemoryMatrix& xi) {
  check_dims(v, xi);
  return 0.5 * v.squaredNorm() - log_sum_exp(xi * v);
}

std::size_t checked_tuple_count(Eigen::Index p, int k, std::size_t budget) {
  std::size_t count = 1;
  for (int j = 0; j < k; ++j) {
    if (count > budget / static_cast<std::size_t>(p)) {
      throw BudgetExceeded("tuple enumeration p^beta = " + std::to_string(p) +
                           "^" + std::to_string(k) + " exceeds budget " +
                           std::to_string(budget));
    }
    count *= static_cast<std::size_t>(p);
  }
  return count;
}

double log_partition(const AttnBmModel& model, std::size_t tuple_budget) {
  validate_memory(model.xi);
  const int k = integer_beta_or_throw(model);
  const double beta = model.beta;
  const auto n = static_cast<double>(model.dim());

  if (k == 1) {
    const Vector half_sq = 0.5 * model.xi.rowwise().squaredNorm();
    return 0.5 * n * std::log(kTwoPi) + log_sum_exp(half_sq);
  }

  checked_tuple_count(model.memories(), k, tuple_budget);

  // Streaming max-shifted log-sum-exp over the p^beta tuple terms.
  double max_term = -std::numeric_limits<double>::infinity();
  visit_memory_tuples(model.xi, k,
                      [&](const std::vector<int>&, const Vector& sum) {
                        const double t = sum.squaredNorm() / (2.0 * beta);
                        if (t > max_term) max_term = t;
                      });
  double acc = 0.0;
  visit_memory_tuples(model.xi, k,
                      [&](const std::vector<int>&, const Vector& sum) {
                        const double t = sum.squaredNorm() / (2.0 * beta);
                        acc += std::exp(t - max_term);
                      });
  return 0.5 * n * std::log(kTwoPi / beta) + max_term + std::log(acc);
}

double log_likelihood(const Vector& v, const AttnBmModel& model,
                      std::size_t tuple_budget) {
  return -model.beta * energy_b(v, model.xi) -
         log_partition(model, tuple_budget);
}

Matrix grad_energy_b(const Vector& v, const MemoryMatrix& xi) {
  check_dims(v, xi);
  const Vector s = softmax(xi * v);
  return -s * v.transpose();
}

Matrix grad_log_partition(const AttnBmModel& model, std::size_t tuple_budget) {
  validate_memory(model.xi);
  const int k = integer_beta_or_throw(model);
  const double beta = model.beta;

  if (k == 1) {
    const Vector s = softmax(0.5 * model.xi.rowwise().squaredNorm());
    return s.asDiagonal() * model.xi;
  }

  checked_tuple_count(model.memories(), k, tuple_budget);

  double max_term = -std::numeric_limits<double>::infinity();
  visit_memory_tuples(model.xi, k,
                      [&](const std::vector<int>&, const Vector& sum) {
                        const double t = sum.squaredNorm() / (2.0 * beta);
                        if (t > max_term) max_term = t;
                      });
  double norm = 0.0;
  visit_memory_tuples(model.xi, k,
                      [&](const std::vector<int>&, const Vector& sum) {
                        const double t = sum.squaredNorm() / (2.0 * beta);
                        norm += std::exp(t - max_term);
                      });

  // d/d xi_{mu,i} of a tuple term contributes once per occurrence of mu,
  // with value softmax-weight * (sum over the tuple)_i / beta.
  Matrix grad = Matrix::Zero(model.memories(), model.dim());
  visit_memory_tuples(
      model.xi, k, [&](const std::vector<int>& digits, const Vector& sum) {
        const double t = sum.squaredNorm() / (2.0 * beta);
        const double w = std::exp(t - max_term) / norm;
        for (int d : digits) {
          grad.row(d).noalias() += (w / beta) * sum.transpose();
        }
      });
  return grad;
}

Matrix grad_nll(const Matrix& batch, const AttnBmModel& model,
                std::size_t tuple_budget) {
  if (batch.rows() == 0) {
    throw std::invalid_argument("grad_nll batch is empty");
  }
  if (batch.cols() != model.dim()) {
    throw std::invalid_argument("grad_nll batch dimension mismatch");
  }
  Matrix mean_grad_e = Matrix::Zero(model.memories(), model.dim());
  for (Eigen::Index b = 0; b < batch.rows(); ++b) {
    mean_grad_e += grad_energy_b(batch.row(b).transpose(), model.xi);
  }
  mean_grad_e /= static_cast<double>(batch.rows());
  return model.beta * mean_grad_e + grad_log_partition(model, tuple_budget);
}

double jensen_log_partition_bound(const AttnBmModel& model) {
  validate_memory(model.xi);
  if (!(model.beta > 1.0)) {
    throw std::domain_error("Jensen bound requires beta > 1");
  }
  const double beta = model.beta;
  const auto n = static_cast<double>(model.dim());
  const auto p = static_cast<double>(model.memories());
  const Vector scaled = 0.5 * beta * model.xi.rowwise().squaredNorm();
  return (beta - 1.0) * std::log(p) + 0.5 * n * std::log(kTwoPi / beta) +
         log_sum_exp(scaled);
}

}  // namespace attnbm
