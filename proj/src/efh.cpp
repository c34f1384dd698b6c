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

#include "attnbm/efh.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "attnbm/energy.hpp"

namespace attnbm {

namespace {
double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace

double ScalarPotential::value(double x) const {
  switch (kind) {
    case PotentialKind::Identity:
      return x;
    case PotentialKind::Square:
      return 0.5 * x * x;
    case PotentialKind::Power:
      return std::pow(x, power) / power;
    case PotentialKind::Softplus:
      // Stable for large |x|.
      return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case PotentialKind::Abs:
      return std::abs(x);
  }
  throw std::logic_error("ScalarPotential: unknown kind");
}

double ScalarPotential::deriv(double x) const {
  switch (kind) {
    case PotentialKind::Identity:
      return 1.0;
    case PotentialKind::Square:
      return x;
    case PotentialKind::Power:
      return std::pow(x, power - 1);
    case PotentialKind::Softplus:
      return 1.0 / (1.0 + std::exp(-x));
    case PotentialKind::Abs:
      return sign(x);
  }
  throw std::logic_error("ScalarPotential: unknown kind");
}

ScalarPotential ScalarPotential::identity() {
  return {PotentialKind::Identity, 2};
}
ScalarPotential ScalarPotential::square() { return {PotentialKind::Square, 2}; }
ScalarPotential ScalarPotential::power_n(int n) {
  if (n < 2) throw std::invalid_argument("power_n: need n >= 2");
  return {PotentialKind::Power, n};
}
ScalarPotential ScalarPotential::softplus() {
  return {PotentialKind::Softplus, 2};
}
ScalarPotential ScalarPotential::abs() { return {PotentialKind::Abs, 2}; }

double energy_a(const Vector& v, const Vector& h, const MemoryMatrix& xi,
                const LagrangianPair& lag) {
  if (v.size() != xi.cols() || h.size() != xi.rows()) {
    throw std::invalid_argument("energy_a: dimension mismatch");
  }
  double total = 0.0;
  Vector gv(v.size());
  for (int i = 0; i < v.size(); ++i) {
    gv[i] = lag.visible.deriv(v[i]);
    total += v[i] * gv[i] - lag.visible.value(v[i]);
  }
  Vector fh(h.size());
  for (int j = 0; j < h.size(); ++j) {
    fh[j] = lag.hidden.deriv(h[j]);
    total += h[j] * fh[j] - lag.hidden.value(h[j]);
  }
  total -= fh.dot(xi * gv);
  return total;
}

EfhSpec::EfhSpec(MemoryMatrix xi, LagrangianPair lag, double beta)
    : xi_(std::move(xi)), lag_(lag), beta_(beta) {
  validate_memory(xi_);
  if (!std::isfinite(beta)) throw std::invalid_argument("EfhSpec: bad beta");
}

double EfhSpec::visible_stat(int a, double x) const {
  if (a == 1) return lag_.visible.deriv(x);
  if (a == 2) return lag_.visible.value(x) - x * lag_.visible.deriv(x);
  throw std::invalid_argument("visible_stat: a must be 1 or 2");
}

double EfhSpec::hidden_stat(int b, double x) const {
  if (b == 1) return lag_.hidden.deriv(x);
  if (b == 2) return lag_.hidden.value(x) - x * lag_.hidden.deriv(x);
  throw std::invalid_argument("hidden_stat: b must be 1 or 2");
}

double EfhSpec::theta(int i, int a) const {
  if (i < 0 || i >= visible_units() || (a != 1 && a != 2)) {
    throw std::invalid_argument("theta: index out of range");
  }
  return a == 2 ? beta_ : 0.0;
}

double EfhSpec::lambda(int j, int b) const {
  if (j < 0 || j >= hidden_units() || (b != 1 && b != 2)) {
    throw std::invalid_argument("lambda: index out of range");
  }
  return b == 2 ? beta_ : 0.0;
}

double EfhSpec::coupling(int i, int a, int j, int b) const {
  if (i < 0 || i >= visible_units() || j < 0 || j >= hidden_units() ||
      (a != 1 && a != 2) || (b != 1 && b != 2)) {
    throw std::invalid_argument("coupling: index out of range");
  }
  return (a == 1 && b == 1) ? beta_ * xi_(j, i) : 0.0;
}

double EfhSpec::log_density_unnorm(const Vector& v, const Vector& h) const {
  if (v.size() != visible_units() || h.size() != hidden_units()) {
    throw std::invalid_argument("log_density_unnorm: dimension mismatch");
  }
  double total = 0.0;
  Vector gv(v.size());
  for (int i = 0; i < v.size(); ++i) {
    gv[i] = lag_.visible.deriv(v[i]);
    total += beta_ * visible_stat(2, v[i]);
  }
  Vector fh(h.size());
  for (int j = 0; j < h.size(); ++j) {
    fh[j] = lag_.hidden.deriv(h[j]);
    total += beta_ * hidden_stat(2, h[j]);
  }
  total += beta_ * fh.dot(xi_ * gv);
  return total;
}

EfhSpec to_efh(MemoryMatrix xi, LagrangianPair lag, double beta) {
  return EfhSpec(std::move(xi), lag, beta);
}

double GridDomain::node(int i) const { return lo + spacing() * i; }

double GridDomain::spacing() const {
  return (hi - lo) / static_cast<double>(points - 1);
}

double GridDomain::trapezoid_weight(int i) const {
  const double dx = spacing();
  return (i == 0 || i == points - 1) ? 0.5 * dx : dx;
}

namespace {

void check_grid(const GridDomain& grid) {
  if (grid.points < 2 || !(grid.lo < grid.hi)) {
    throw std::invalid_argument("GridDomain: need points >= 2 and lo < hi");
  }
}

// Both layer conditionals share the shape
//   p(x) ~ exp(beta * [(P(x) - x p(x)) + p(x) * field])
// with (P, p) the unit's potential/derivative and `field` the summed input
// from the other layer.
Conditional1d gridded_conditional(const ScalarPotential& pot, double beta,
                                  double field, const GridDomain& grid) {
  check_grid(grid);
  Vector logits(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.node(i);
    const double d = pot.deriv(x);
    logits[i] = beta * ((pot.value(x) - x * d) + d * field);
  }
  const double peak = logits.maxCoeff();
  Conditional1d out;
  out.grid = grid;
  out.probs.resize(grid.points);
  double total = 0.0;
  for (int i = 0; i < grid.points; ++i) {
    out.probs[i] = grid.trapezoid_weight(i) * std::exp(logits[i] - peak);
    total += out.probs[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::runtime_error("gridded_conditional: degenerate density");
  }
  out.probs /= total;
  const double edge = std::max(std::exp(logits[0] - peak),
                               std::exp(logits[grid.points - 1] - peak));
  out.boundary_ok = edge < 1e-8;
  return out;
}

double hidden_field(const EfhSpec& spec, int j, const Vector& v) {
  double field = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    field += spec.xi()(j, i) * spec.lagrangians().visible.deriv(v[i]);
  }
  return field;
}

double visible_field(const EfhSpec& spec, int i, const Vector& h) {
  double field = 0.0;
  for (int j = 0; j < h.size(); ++j) {
    field += spec.lagrangians().hidden.deriv(h[j]) * spec.xi()(j, i);
  }
  return field;
}

Conditional1d expand_until_contained(const ScalarPotential& pot, double beta,
                                     double field, const GridOptions& opts,
                                     int* warnings) {
  GridDomain grid = opts.grid;
  Conditional1d cond = gridded_conditional(pot, beta, field, grid);
  int expansions = 0;
  while (!cond.boundary_ok && opts.auto_expand &&
         expansions < opts.max_expansions) {
    const double mid = 0.5 * (grid.lo + grid.hi);
    const double half = (grid.hi - grid.lo);  // doubled width
    grid.lo = mid - half;
    grid.hi = mid + half;
    grid.points = 2 * grid.points - 1;  // keep the original spacing
    cond = gridded_conditional(pot, beta, field, grid);
    ++expansions;
  }
  if (!cond.boundary_ok && warnings) ++*warnings;
  return cond;
}

int sample_index(const Conditional1d& cond, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cum = 0.0;
  for (int i = 0; i < cond.probs.size(); ++i) {
    cum += cond.probs[i];
    if (u <= cum) return i;
  }
  return static_cast<int>(cond.probs.size()) - 1;
}

}  // namespace

Conditional1d conditional_hidden(const EfhSpec& spec, int j, const Vector& v,
                                 const GridDomain& grid) {
  if (j < 0 || j >= spec.hidden_units() || v.size() != spec.visible_units()) {
    throw std::invalid_argument("conditional_hidden: index/dim mismatch");
  }
  return gridded_conditional(spec.lagrangians().hidden, spec.beta(),
                             hidden_field(spec, j, v), grid);
}

Conditional1d conditional_visible(const EfhSpec& spec, int i, const Vector& h,
                                  const GridDomain& grid) {
  if (i < 0 || i >= spec.visible_units() || h.size() != spec.hidden_units()) {
    throw std::invalid_argument("conditional_visible: index/dim mismatch");
  }
  return gridded_conditional(spec.lagrangians().visible, spec.beta(),
                             visible_field(spec, i, h), grid);
}

double hidden_mean_activation(const EfhSpec& spec, int j, const Vector& v,
                              const GridDomain& grid) {
  const Conditional1d cond = conditional_hidden(spec, j, v, grid);
  double mean = 0.0;
  for (int i = 0; i < cond.grid.points; ++i) {
    mean += cond.probs[i] * spec.lagrangians().hidden.deriv(cond.grid.node(i));
  }
  return mean;
}

GibbsState gibbs_step(const GibbsState& state, const EfhSpec& spec,
                      const GridOptions& opts, Rng& rng) {
  if (state.v.size() != spec.visible_units() ||
      state.h.size() != spec.hidden_units()) {
    throw std::invalid_argument("gibbs_step: dimension mismatch");
  }
  GibbsState next = state;
  for (int j = 0; j < spec.hidden_units(); ++j) {
    const Conditional1d cond = expand_until_contained(
        spec.lagrangians().hidden, spec.beta(), hidden_field(spec, j, state.v),
        opts, &next.boundary_warnings);
    next.h[j] = cond.grid.node(sample_index(cond, rng));
  }
  for (int i = 0; i < spec.visible_units(); ++i) {
    const Conditional1d cond = expand_until_contained(
        spec.lagrangians().visible, spec.beta(),
        visible_field(spec, i, next.h), opts, &next.boundary_warnings);
    next.v[i] = cond.grid.node(sample_index(cond, rng));
  }
  return next;
}

double grid_free_energy(const EfhSpec& spec, const Vector& v,
                        const GridDomain& grid) {
  if (v.size() != spec.visible_units()) {
    throw std::invalid_argument("grid_free_energy: dimension mismatch");
  }
  check_grid(grid);
  const LagrangianPair& lag = spec.lagrangians();
  const double beta = spec.beta();
  double visible_term = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    visible_term += v[i] * lag.visible.deriv(v[i]) - lag.visible.value(v[i]);
  }
  // Hidden units integrate out independently given v.
  double hidden_term = 0.0;
  for (int j = 0; j < spec.hidden_units(); ++j) {
    const double field = hidden_field(spec, j, v);
    Vector logits(grid.points);
    for (int i = 0; i < grid.points; ++i) {
      const double x = grid.node(i);
      const double f = lag.hidden.deriv(x);
      logits[i] = -beta * ((x * f - lag.hidden.value(x)) - f * field) +
                  std::log(grid.trapezoid_weight(i));
    }
    hidden_term -= log_sum_exp(logits) / beta;
  }
  return visible_term + hidden_term;
}

Matrix cd_gradient_estimate(const Matrix& batch, const EfhSpec& spec, int k,
                            const GridOptions& opts, Rng& rng) {
  if (batch.rows() < 1 || batch.cols() != spec.visible_units()) {
    throw std::invalid_argument("cd_gradient_estimate: bad batch");
  }
  if (k < 1) throw std::invalid_argument("cd_gradient_estimate: need k >= 1");
  const int p = spec.hidden_units();
  const int n = spec.visible_units();
  const LagrangianPair& lag = spec.lagrangians();
  Matrix data_phase = Matrix::Zero(p, n);
  Matrix model_phase = Matrix::Zero(p, n);
  Vector fh(p), gv(n);
  for (int row = 0; row < batch.rows(); ++row) {
    const Vector v0 = batch.row(row).transpose();
    // Data phase: exact conditional mean of f(h_j) on the grid.
    for (int j = 0; j < p; ++j) {
      fh[j] = hidden_mean_activation(spec, j, v0, opts.grid);
    }
    for (int i = 0; i < n; ++i) gv[i] = lag.visible.deriv(v0[i]);
    data_phase.noalias() += fh * gv.transpose();
    // Chain phase: k block-Gibbs steps, then the same conditional-mean
    // replacement for the final hidden factor.
    GibbsState state;
    state.v = v0;
    state.h = Vector::Zero(p);
    for (int step = 0; step < k; ++step) {
      state = gibbs_step(state, spec, opts, rng);
    }
    for (int j = 0; j < p; ++j) {
      fh[j] = hidden_mean_activation(spec, j, state.v, opts.grid);
    }
    for (int i = 0; i < n; ++i) gv[i] = lag.visible.deriv(state.v[i]);
    model_phase.noalias() += fh * gv.transpose();
  }
  const double count = static_cast<double>(batch.rows());
  return spec.beta() * (model_phase - data_phase) / count;
}

TrainReport cd_k(const Matrix& data, const MemoryMatrix& init,
                 const LagrangianPair& lag, double beta, int k,
                 const TrainConfig& cfg, const GridOptions& opts) {
  if (init.rows() > 8 || init.cols() > 8) {
    throw std::invalid_argument("cd_k: enumerable scale only (units <= 8)");
  }
  if (opts.grid.points > 128) {
    throw std::invalid_argument("cd_k: grid limited to 128 points");
  }
  if (data.rows() < 1) throw std::invalid_argument("cd_k: empty dataset");
  if (data.cols() != init.cols()) {
    throw std::invalid_argument("cd_k: data/memory dimension mismatch");
  }
  if (cfg.batch_size < 1) throw std::invalid_argument("cd_k: bad batch size");

  const int samples = static_cast<int>(data.rows());
  Rng rng(cfg.seed);
  MemoryMatrix xi = init;
  Matrix velocity = Matrix::Zero(init.rows(), init.cols());
  std::vector<int> order(static_cast<std::size_t>(samples));
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  using Clock = std::chrono::steady_clock;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = Clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_objective = 0.0;
    for (int begin = 0; begin < samples; begin += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, samples - begin);
      Matrix batch(count, data.cols());
      for (int i = 0; i < count; ++i) {
        batch.row(i) = data.row(order[static_cast<std::size_t>(begin + i)]);
      }
      const EfhSpec spec(xi, lag, beta);
      Matrix grad = cd_gradient_estimate(batch, spec, k, opts, rng);
      double objective = 0.0;
      for (int i = 0; i < count; ++i) {
        objective +=
            grid_free_energy(spec, batch.row(i).transpose(), opts.grid);
      }
      objective /= count;
      if (!std::isfinite(objective) || !grad.allFinite()) {
        throw std::runtime_error(
            "cd_k: objective diverged (non-finite value; the learning rate "
            "is likely too large)");
      }
      if (cfg.weight_decay != 0.0) grad.noalias() += cfg.weight_decay * xi;
      velocity = cfg.momentum * velocity + grad;
      xi.noalias() -= cfg.learning_rate * velocity;
      epoch_objective += objective * count;
    }
    report.objective.push_back(epoch_objective / samples);
    report.seconds.push_back(
        std::chrono::duration<double>(Clock::now() - start).count());
  }
  report.final_xi = std::move(xi);
  return report;
}

}  // namespace attnbm
