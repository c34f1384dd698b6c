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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "attnbm/efh.hpp"
#include "attnbm/quadrature.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using attnbm::Conditional1d;
using attnbm::EfhSpec;
using attnbm::GibbsState;
using attnbm::GridDomain;
using attnbm::GridOptions;
using attnbm::LagrangianPair;
using attnbm::Matrix;
using attnbm::MemoryMatrix;
using attnbm::Rng;
using attnbm::ScalarPotential;
using attnbm::Vector;

namespace {

std::vector<LagrangianPair> preset_pairs() {
  return {
      {ScalarPotential::identity(), ScalarPotential::square()},
      {ScalarPotential::square(), ScalarPotential::square()},
      {ScalarPotential::softplus(), ScalarPotential::square()},
      {ScalarPotential::power_n(3), ScalarPotential::square()},
      {ScalarPotential::square(), ScalarPotential::abs()},
      {ScalarPotential::softplus(), ScalarPotential::abs()},
  };
}

}  // namespace

TEST_CASE("scalar potentials and their derivatives") {
  const ScalarPotential id = ScalarPotential::identity();
  CHECK(id.value(3.5) == 3.5);
  CHECK(id.deriv(-2.0) == 1.0);

  const ScalarPotential sq = ScalarPotential::square();
  CHECK(sq.value(3.0) == 4.5);
  CHECK(sq.deriv(3.0) == 3.0);

  const ScalarPotential cube = ScalarPotential::power_n(3);
  CHECK(cube.value(2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(cube.deriv(2.0) == 4.0);
  CHECK_THROWS_AS(ScalarPotential::power_n(1), std::invalid_argument);

  const ScalarPotential soft = ScalarPotential::softplus();
  CHECK(soft.value(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(soft.deriv(0.0) == 0.5);
  CHECK(soft.value(800.0) == 800.0);  // no overflow
  CHECK(soft.value(-800.0) == 0.0);
  CHECK(std::abs(soft.value(5.0) - std::log1p(std::exp(5.0))) < 1e-15);

  const ScalarPotential ab = ScalarPotential::abs();
  CHECK(ab.value(-4.0) == 4.0);
  CHECK(ab.deriv(-4.0) == -1.0);
  CHECK(ab.deriv(4.0) == 1.0);
  CHECK(ab.deriv(0.0) == 0.0);

  // Derivatives agree with central differences where smooth.
  for (const ScalarPotential& pot : {sq, cube, soft}) {
    for (double x : {-1.3, 0.2, 1.7}) {
      const double h = 1e-6;
      const double fd = (pot.value(x + h) - pot.value(x - h)) / (2.0 * h);
      CHECK(std::abs(fd - pot.deriv(x)) < 1e-8);
    }
  }
}

TEST_CASE("joint energy: quadratic closed form and origin value") {
  Rng rng(71);
  const MemoryMatrix xi = oracle::random_memory(3, 2, 1.0, rng);
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  for (int rep = 0; rep < 10; ++rep) {
    const Vector v = oracle::random_vector(2, 1.0, rng);
    const Vector h = oracle::random_vector(3, 1.0, rng);
    const double want =
        0.5 * v.squaredNorm() + 0.5 * h.squaredNorm() - h.dot(xi * v);
    CHECK(std::abs(attnbm::energy_a(v, h, xi, quad) - want) < 1e-13);
  }

  const LagrangianPair mixed{ScalarPotential::square(),
                             ScalarPotential::abs()};
  CHECK(attnbm::energy_a(Vector::Zero(2), Vector::Zero(3), xi, mixed) == 0.0);
}

TEST_CASE("harmonium log density equals the scaled negative energy") {
  Rng rng(72);
  for (const LagrangianPair& lag : preset_pairs()) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const MemoryMatrix xi = oracle::random_memory(2, 3, 0.8, rng);
      const EfhSpec spec = attnbm::to_efh(xi, lag, beta);
      for (int rep = 0; rep < 20; ++rep) {
        const Vector v = oracle::random_vector(3, 1.2, rng);
        const Vector h = oracle::random_vector(2, 1.2, rng);
        const double lhs = spec.log_density_unnorm(v, h);
        const double rhs = -beta * attnbm::energy_a(v, h, xi, lag);
        CHECK(std::abs(lhs - rhs) < 1e-10);
      }
    }
  }
}

TEST_CASE("natural parameters and coupling carry the expected sparsity") {
  Rng rng(73);
  const MemoryMatrix xi = oracle::random_memory(2, 3, 1.0, rng);
  const double beta = 1.7;
  const EfhSpec spec(xi, preset_pairs()[1], beta);
  for (int i = 0; i < 3; ++i) {
    CHECK(spec.theta(i, 1) == 0.0);
    CHECK(spec.theta(i, 2) == beta);
  }
  for (int j = 0; j < 2; ++j) {
    CHECK(spec.lambda(j, 1) == 0.0);
    CHECK(spec.lambda(j, 2) == beta);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(spec.coupling(i, 1, j, 1) == beta * xi(j, i));
      CHECK(spec.coupling(i, 2, j, 1) == 0.0);
      CHECK(spec.coupling(i, 1, j, 2) == 0.0);
      CHECK(spec.coupling(i, 2, j, 2) == 0.0);
    }
  }
  CHECK_THROWS_AS(spec.theta(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(spec.lambda(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(spec.coupling(0, 0, 0, 1), std::invalid_argument);

  // Second statistics match their definition at sample points.
  const ScalarPotential& vis = spec.lagrangians().visible;
  for (double x : {-1.0, 0.3, 2.0}) {
    CHECK(spec.visible_stat(1, x) == vis.deriv(x));
    CHECK(spec.visible_stat(2, x) == vis.value(x) - x * vis.deriv(x));
  }
}

TEST_CASE("zero coupling separates the layers additively") {
  Rng rng(74);
  const MemoryMatrix xi = MemoryMatrix::Zero(2, 2);
  const EfhSpec spec(xi, preset_pairs()[2], 1.3);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector v = oracle::random_vector(2, 1.0, rng);
    const Vector h = oracle::random_vector(2, 1.0, rng);
    const double joint = spec.log_density_unnorm(v, h);
    const double split = spec.log_density_unnorm(v, Vector::Zero(2)) +
                         spec.log_density_unnorm(Vector::Zero(2), h) -
                         spec.log_density_unnorm(Vector::Zero(2),
                                                 Vector::Zero(2));
    CHECK(std::abs(joint - split) < 1e-12);
  }
}

TEST_CASE("gridded conditionals recover the Gaussian closed form") {
  Rng rng(75);
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  MemoryMatrix xi(1, 2);
  xi << 0.7, -0.4;
  for (double beta : {1.0, 2.0}) {
    const EfhSpec spec(xi, quad, beta);
    const Vector v = oracle::random_vector(2, 1.0, rng);
    const double field = xi.row(0).dot(v);
    GridDomain grid;
    grid.lo = -12.0;
    grid.hi = 12.0;
    grid.points = 241;
    const Conditional1d cond = attnbm::conditional_hidden(spec, 0, v, grid);
    CHECK(cond.boundary_ok);
    CHECK(std::abs(cond.probs.sum() - 1.0) < 1e-12);
    double mean = 0.0, second = 0.0;
    for (int i = 0; i < grid.points; ++i) {
      mean += cond.probs[i] * grid.node(i);
      second += cond.probs[i] * grid.node(i) * grid.node(i);
    }
    CHECK(std::abs(mean - field) < 1e-9);
    CHECK(std::abs((second - mean * mean) - 1.0 / beta) < 1e-6);
    CHECK(std::abs(attnbm::hidden_mean_activation(spec, 0, v, grid) - field) <
          1e-9);
  }
}

TEST_CASE("mirrored inputs mirror the conditional") {
  Rng rng(76);
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  const MemoryMatrix xi = oracle::random_memory(1, 3, 0.8, rng);
  const EfhSpec spec(xi, quad, 1.0);
  const Vector v = oracle::random_vector(3, 1.0, rng);
  GridDomain grid;  // symmetric default [-6, 6]
  grid.points = 65;
  const Conditional1d plus = attnbm::conditional_hidden(spec, 0, v, grid);
  const Conditional1d minus = attnbm::conditional_hidden(spec, 0, -v, grid);
  for (int i = 0; i < grid.points; ++i) {
    CHECK(std::abs(plus.probs[i] - minus.probs[grid.points - 1 - i]) < 1e-12);
  }
}

TEST_CASE("boundary detection and automatic widening") {
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  MemoryMatrix xi(1, 1);
  xi << 4.0;
  const EfhSpec spec(xi, quad, 1.0);
  Vector v(1);
  v << 5.0;  // conditional mean 20, far outside the default grid

  GridDomain narrow;  // [-6, 6]
  const Conditional1d clipped = attnbm::conditional_hidden(spec, 0, v, narrow);
  CHECK(!clipped.boundary_ok);

  GridOptions opts;
  opts.auto_expand = true;
  Rng rng(5);
  GibbsState state;
  state.v = v;
  state.h = Vector::Zero(1);
  const GibbsState next = attnbm::gibbs_step(state, spec, opts, rng);
  CHECK(next.boundary_warnings == 0);
  CHECK(std::abs(next.h[0] - 20.0) < 5.0);

  GridOptions fixed;
  fixed.auto_expand = false;
  Rng rng2(5);
  const GibbsState stuck = attnbm::gibbs_step(state, spec, fixed, rng2);
  CHECK(stuck.boundary_warnings > 0);
}

TEST_CASE("conditional over two hidden units factorizes") {
  Rng rng(77);
  const LagrangianPair lag{ScalarPotential::softplus(),
                           ScalarPotential::square()};
  const MemoryMatrix xi = oracle::random_memory(2, 2, 0.9, rng);
  const EfhSpec spec(xi, lag, 1.0);
  const Vector v = oracle::random_vector(2, 1.0, rng);

  GridDomain grid;
  grid.lo = -8.0;
  grid.hi = 8.0;
  grid.points = 33;
  const Conditional1d c0 = attnbm::conditional_hidden(spec, 0, v, grid);
  const Conditional1d c1 = attnbm::conditional_hidden(spec, 1, v, grid);

  // Joint conditional over the product grid, straight from the log density.
  Matrix joint(grid.points, grid.points);
  double peak = -1e300;
  for (int a = 0; a < grid.points; ++a) {
    for (int b = 0; b < grid.points; ++b) {
      Vector h(2);
      h << grid.node(a), grid.node(b);
      joint(a, b) = spec.log_density_unnorm(v, h);
      peak = std::max(peak, joint(a, b));
    }
  }
  double total = 0.0;
  for (int a = 0; a < grid.points; ++a) {
    for (int b = 0; b < grid.points; ++b) {
      joint(a, b) = std::exp(joint(a, b) - peak) * grid.trapezoid_weight(a) *
                    grid.trapezoid_weight(b);
      total += joint(a, b);
    }
  }
  joint /= total;
  double worst = 0.0;
  for (int a = 0; a < grid.points; ++a) {
    for (int b = 0; b < grid.points; ++b) {
      worst = std::max(worst, std::abs(joint(a, b) - c0.probs[a] * c1.probs[b]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("uncoupled Gibbs sampling matches its target distribution") {
  // With zero coupling the hidden conditional never depends on the state,
  // so successive draws are i.i.d. from the gridded law. Pearson test over
  // equal-mass bins at the 1% level.
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  const MemoryMatrix xi = MemoryMatrix::Zero(1, 1);
  const EfhSpec spec(xi, quad, 1.0);
  GridOptions opts;
  opts.auto_expand = false;

  const Conditional1d law =
      attnbm::conditional_hidden(spec, 0, Vector::Zero(1), opts.grid);

  // Greedy equal-probability binning of the grid atoms.
  const int kBins = 8;
  std::vector<int> bin_of(static_cast<std::size_t>(opts.grid.points));
  std::vector<double> expected_p(kBins, 0.0);
  {
    int bin = 0;
    double acc = 0.0;
    for (int i = 0; i < opts.grid.points; ++i) {
      if (acc >= (bin + 1.0) / kBins && bin < kBins - 1) ++bin;
      bin_of[static_cast<std::size_t>(i)] = bin;
      expected_p[static_cast<std::size_t>(bin)] += law.probs[i];
      acc += law.probs[i];
    }
  }

  Rng rng(20260821);
  GibbsState state;
  state.v = Vector::Zero(1);
  state.h = Vector::Zero(1);
  const int n = 4000;
  std::vector<double> observed(kBins, 0.0);
  for (int t = 0; t < n; ++t) {
    state = attnbm::gibbs_step(state, spec, opts, rng);
    const int idx = static_cast<int>(
        std::lround((state.h[0] - opts.grid.lo) / opts.grid.spacing()));
    observed[static_cast<std::size_t>(bin_of[static_cast<std::size_t>(idx)])] +=
        1.0;
  }
  std::vector<double> expected(kBins);
  for (int b = 0; b < kBins; ++b) expected[b] = n * expected_p[b];
  const double stat = oracle::chi2_statistic(observed, expected);
  CHECK(stat < 18.475);  // chi-square(7) at the 0.99 quantile
}

TEST_CASE("grid free energy agrees with adaptive integration") {
  Rng rng(78);
  MemoryMatrix xi(1, 1);
  xi << 0.8;
  for (const LagrangianPair lag :
       {LagrangianPair{ScalarPotential::square(), ScalarPotential::square()},
        LagrangianPair{ScalarPotential::softplus(),
                       ScalarPotential::square()}}) {
    for (double beta : {1.0, 2.0}) {
      const EfhSpec spec(xi, lag, beta);
      GridDomain grid;
      grid.lo = -14.0;
      grid.hi = 14.0;
      grid.points = 113;
      for (double vx : {-1.1, 0.4, 1.6}) {
        Vector v(1);
        v << vx;
        const double got = attnbm::grid_free_energy(spec, v, grid);
        const double g = lag.visible.deriv(vx);
        const double visible = vx * g - lag.visible.value(vx);
        const double field = xi(0, 0) * g;
        const double mass = attnbm::integrate_adaptive(
            [&](double h) {
              const double f = lag.hidden.deriv(h);
              return std::exp(-beta * ((h * f - lag.hidden.value(h)) -
                                       f * field));
            },
            grid.lo, grid.hi, 1e-12);
        const double want = visible - std::log(mass) / beta;
        // The soft-saturating hidden potential leaves a flat integrand tail,
        // so the trapezoid rule carries a few 1e-9 of discretization error.
        CHECK(std::abs(got - want) < 2e-8);
      }
    }
  }
}

TEST_CASE("contrastive estimates are reproducible and correctly shaped") {
  Rng rng(79);
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  const MemoryMatrix xi = 0.4 * MemoryMatrix::Ones(2, 2);
  const EfhSpec spec(xi, quad, 1.0);
  Matrix batch(3, 2);
  batch << 0.5, -0.2, 1.0, 0.3, -0.7, 0.1;
  GridOptions opts;
  opts.grid.points = 65;

  Rng a(31), b(31), c(32);
  const Matrix g1 = attnbm::cd_gradient_estimate(batch, spec, 2, opts, a);
  const Matrix g2 = attnbm::cd_gradient_estimate(batch, spec, 2, opts, b);
  const Matrix g3 = attnbm::cd_gradient_estimate(batch, spec, 2, opts, c);
  CHECK(g1.rows() == 2);
  CHECK(g1.cols() == 2);
  CHECK((g1 - g2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1 - g3).cwiseAbs().maxCoeff() > 0.0);
  CHECK_THROWS_AS(attnbm::cd_gradient_estimate(batch, spec, 0, opts, a),
                  std::invalid_argument);
}

TEST_CASE("contrastive training: frozen rate, guards, objective trend") {
  Rng rng(80);
  const LagrangianPair quad{ScalarPotential::square(),
                            ScalarPotential::square()};
  // Mean square safely above one, so the coupling has a strong pull toward
  // sqrt(1 - 1/mean(v^2)) = 0.71 and the trend survives sampling noise.
  Matrix data(8, 1);
  data << 1.2, 0.9, 1.4, 1.1, -0.2, 1.0, 1.3, 0.8;
  data *= 1.35;
  MemoryMatrix init(1, 1);
  init << 0.05;

  attnbm::TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.seed = 9;
  GridOptions opts;
  opts.grid.points = 65;
  const attnbm::TrainReport frozen =
      attnbm::cd_k(data, init, quad, 1.0, 1, cfg, opts);
  CHECK((frozen.final_xi - init).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(frozen.objective.size() == 2);
  CHECK(std::abs(frozen.objective[0] - frozen.objective[1]) < 1e-12);

  cfg.learning_rate = 0.05;
  cfg.epochs = 80;
  cfg.batch_size = 8;  // full-batch steps keep the drift deterministic-ish
  const attnbm::TrainReport moving =
      attnbm::cd_k(data, init, quad, 1.0, 1, cfg, opts);
  CHECK(moving.final_xi(0, 0) > 0.4);  // well on the way to the fixed point
  CHECK(moving.objective.back() < moving.objective.front());

  const MemoryMatrix too_big = MemoryMatrix::Zero(9, 1);
  CHECK_THROWS_AS(attnbm::cd_k(data, too_big, quad, 1.0, 1, cfg, opts),
                  std::invalid_argument);
  GridOptions dense;
  dense.grid.points = 200;
  CHECK_THROWS_AS(attnbm::cd_k(data, init, quad, 1.0, 1, cfg, dense),
                  std::invalid_argument);
}
