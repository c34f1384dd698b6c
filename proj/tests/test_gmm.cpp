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

#include "attnbm/energy.hpp"
#include "attnbm/errors.hpp"
#include "attnbm/gmm.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using attnbm::AttnBmModel;
using attnbm::GaussianMixture;
using attnbm::Matrix;
using attnbm::MemoryMatrix;
using attnbm::Rng;
using attnbm::Vector;

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kPi = 3.14159265358979323846;

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}
}  // namespace

TEST_CASE("mixture construction validates its inputs") {
  Vector w(2);
  w << 0.25, 0.75;
  Matrix means(2, 3);
  means.setZero();
  CHECK_NOTHROW(attnbm::make_mixture(w, means, 1.0));

  Vector near(2);
  near << 0.25 + 3e-13, 0.75;  // within the renormalization window
  const GaussianMixture fixed = attnbm::make_mixture(near, means, 1.0);
  CHECK(std::abs(fixed.weights.sum() - 1.0) < 1e-15);

  Vector off(2);
  off << 0.4, 0.4;
  CHECK_THROWS_AS(attnbm::make_mixture(off, means, 1.0),
                  std::invalid_argument);
  Vector neg(2);
  neg << -0.25, 1.25;
  CHECK_THROWS_AS(attnbm::make_mixture(neg, means, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(attnbm::make_mixture(w, means, 0.0), std::invalid_argument);
  Vector w3(3);
  w3 << 0.2, 0.3, 0.5;
  CHECK_THROWS_AS(attnbm::make_mixture(w3, means, 1.0),
                  std::invalid_argument);
}

TEST_CASE("mixture density against hand-rolled evaluation") {
  Vector w(1);
  w << 1.0;
  Matrix mean = Matrix::Zero(1, 3);
  const GaussianMixture single = attnbm::make_mixture(w, mean, 1.0);
  CHECK(std::abs(attnbm::gmm_log_density(single, Vector::Zero(3)) +
                 1.5 * kLog2Pi) < 1e-14);

  Rng rng(31);
  Vector w2(2);
  w2 << 0.3, 0.7;
  Matrix means(2, 2);
  means << 1.0, -0.5, -2.0, 0.25;
  const double var = 0.6;
  const GaussianMixture gmm = attnbm::make_mixture(w2, means, var);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector v = oracle::random_vector(2, 1.5, rng);
    double direct = 0.0;
    for (int mu = 0; mu < 2; ++mu) {
      const double d2 = (v - means.row(mu).transpose()).squaredNorm();
      direct += w2[mu] * std::exp(-0.5 * d2 / var) / (2.0 * kPi * var);
    }
    const double got = attnbm::gmm_density(gmm, v);
    CHECK(std::abs(got - direct) / direct < 1e-13);
    CHECK(std::abs(std::exp(attnbm::gmm_log_density(gmm, v)) - got) / got <
          1e-13);
  }
}

TEST_CASE("model density equals its mixture form") {
  Rng rng(32);
  for (int beta = 1; beta <= 3; ++beta) {
    const int p = 1 + static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 3);
    const MemoryMatrix xi = oracle::random_memory(p, n, 0.9, rng);
    const AttnBmModel model = attnbm::make_integer_beta_model(xi, beta);
    const GaussianMixture gmm = attnbm::to_gmm(model);
    CHECK(gmm.components() == static_cast<int>(std::pow(p, beta) + 0.5));
    CHECK(std::abs(gmm.variance - 1.0 / beta) < 1e-15);
    for (int rep = 0; rep < 25; ++rep) {
      const Vector v = oracle::random_vector(n, 1.0, rng);
      const double model_density = std::exp(attnbm::log_likelihood(v, model));
      const double mix_density = attnbm::gmm_density(gmm, v);
      CHECK(std::abs(model_density - mix_density) / mix_density < 1e-10);
    }
  }
}

TEST_CASE("unit-temperature mixture has attention weights over memories") {
  Rng rng(33);
  const MemoryMatrix xi = oracle::random_memory(4, 3, 1.1, rng);
  const GaussianMixture gmm =
      attnbm::to_gmm(attnbm::make_integer_beta_model(xi, 1));
  Vector half_norms(4);
  for (int mu = 0; mu < 4; ++mu) half_norms[mu] = 0.5 * xi.row(mu).squaredNorm();
  const Vector want = attnbm::softmax(half_norms);
  CHECK((gmm.weights - want).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((gmm.means - xi).cwiseAbs().maxCoeff() == 0.0);
  CHECK(gmm.variance == 1.0);
}

TEST_CASE("temperature expansion is a change of variables") {
  Rng rng(34);
  for (int beta = 2; beta <= 3; ++beta) {
    const MemoryMatrix xi = oracle::random_memory(3, 2, 0.8, rng);
    const AttnBmModel model = attnbm::make_integer_beta_model(xi, beta);
    const attnbm::ExpandedModel flat = attnbm::expand_beta(model);
    CHECK(flat.scale == static_cast<double>(beta));
    CHECK(flat.xi.rows() == static_cast<int>(std::pow(3, beta) + 0.5));
    const AttnBmModel unit = attnbm::make_integer_beta_model(flat.xi, 1);
    for (int rep = 0; rep < 20; ++rep) {
      const Vector v = oracle::random_vector(2, 1.0, rng);
      const double left = attnbm::log_likelihood(v, model);
      const double right = 0.5 * 2 * std::log(flat.scale) +
                           attnbm::log_likelihood(std::sqrt(flat.scale) * v,
                                                  unit);
      CHECK(std::abs(std::exp(left - right) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("ancestral sampling matches the mixture law") {
  Rng rng(35);
  SUBCASE("shapes and determinism") {
    Vector w(2);
    w << 0.5, 0.5;
    Matrix means(2, 3);
    means << 1, 0, 0, -1, 0, 0;
    const GaussianMixture gmm = attnbm::make_mixture(w, means, 1.0);
    Rng a(7), b(7);
    const Matrix s1 = attnbm::sample_mixture(gmm, 50, a);
    const Matrix s2 = attnbm::sample_mixture(gmm, 50, b);
    CHECK(s1.rows() == 50);
    CHECK(s1.cols() == 3);
    CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("one-dimensional two-component law passes a KS test") {
    Vector w(2);
    w << 0.35, 0.65;
    Matrix means(2, 1);
    means << -2.0, 1.5;
    const double var = 0.49;
    const GaussianMixture gmm = attnbm::make_mixture(w, means, var);
    const int n = 4000;
    const Matrix draws = attnbm::sample_mixture(gmm, n, rng);
    std::vector<double> xs(draws.data(), draws.data() + n);
    const double sd = std::sqrt(var);
    const double stat = oracle::ks_statistic(xs, [&](double x) {
      return w[0] * normal_cdf(x, means(0, 0), sd) +
             w[1] * normal_cdf(x, means(1, 0), sd);
    });
    // 1% critical value for the one-sample statistic.
    CHECK(stat < 1.628 / std::sqrt(double(n)));
  }
}

TEST_CASE("binary-hidden expansion splits into attention and remainder") {
  Rng rng(36);
  SUBCASE("weights are the memory rows") {
    const MemoryMatrix xi = oracle::random_memory(3, 2, 1.0, rng);
    const attnbm::GbRbmWeights rbm = attnbm::gb_rbm_from_memories(xi);
    CHECK((rbm.w - xi).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single hidden unit has no remainder") {
    const MemoryMatrix xi = oracle::random_memory(1, 3, 1.0, rng);
    const attnbm::GbRbmWeights rbm = attnbm::gb_rbm_from_memories(xi);
    const Vector v = oracle::random_vector(3, 1.0, rng);
    const attnbm::TruncationGap gap = attnbm::gb_truncation_gap(rbm, v);
    CHECK(gap.higher_order == 0.0);
    CHECK(gap.gb == gap.attention);
  }
  SUBCASE("subset enumeration oracle") {
    for (int p = 2; p <= 5; ++p) {
      const MemoryMatrix xi = oracle::random_memory(p, 3, 0.8, rng);
      const attnbm::GbRbmWeights rbm = attnbm::gb_rbm_from_memories(xi);
      for (int rep = 0; rep < 5; ++rep) {
        const Vector v = oracle::random_vector(3, 1.0, rng);
        const attnbm::TruncationGap gap = attnbm::gb_truncation_gap(rbm, v);
        const oracle::SubsetSplit split = oracle::subset_sum_split(xi, v);
        CHECK(std::abs(gap.gb - split.all) / split.all < 1e-12);
        CHECK(std::abs(gap.attention - split.single) / split.single < 1e-12);
        CHECK(std::abs(gap.gb - gap.attention - gap.higher_order) <
              1e-12 * gap.gb);
        CHECK(gap.higher_order >= 0.0);
      }
    }
  }
  SUBCASE("zero weights give counting closed forms") {
    const int p = 6;
    const attnbm::GbRbmWeights rbm{Matrix::Zero(p, 2)};
    Vector v(2);
    v << 0.3, -0.4;
    const double gauss = std::exp(-0.5 * v.squaredNorm());
    const attnbm::TruncationGap gap = attnbm::gb_truncation_gap(rbm, v);
    CHECK(std::abs(gap.gb - std::pow(2.0, p) * gauss) < 1e-13 * gap.gb);
    CHECK(std::abs(gap.attention - (1.0 + p) * gauss) < 1e-14);
  }
  SUBCASE("hidden-count guard") {
    const attnbm::GbRbmWeights rbm{Matrix::Zero(21, 2)};
    CHECK_THROWS_AS(attnbm::gb_truncation_gap(rbm, Vector::Zero(2)),
                    attnbm::BudgetExceeded);
  }
}

TEST_CASE("mixture enumeration respects the tuple budget") {
  Rng rng(37);
  const MemoryMatrix xi = oracle::random_memory(10, 2, 0.5, rng);
  const AttnBmModel model = attnbm::make_integer_beta_model(xi, 8);
  CHECK_THROWS_AS(attnbm::to_gmm(model), attnbm::BudgetExceeded);
  CHECK_THROWS_AS(attnbm::expand_beta(model), attnbm::BudgetExceeded);
}
