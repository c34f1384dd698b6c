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

#include "attnbm/verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "attnbm/efh.hpp"
#include "attnbm/energy.hpp"
#include "attnbm/gmm.hpp"
#include "attnbm/hopfield.hpp"
#include "attnbm/quadrature.hpp"
#include "attnbm/reconstruction.hpp"
#include "attnbm/training.hpp"
#include "attnbm/types.hpp"
#include "attnbm/vmf.hpp"

namespace attnbm {

namespace {

MemoryMatrix random_memory(int p, int n, double scale, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, scale);
  MemoryMatrix xi(p, n);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) xi(i, j) = gauss(rng);
  }
  return xi;
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// Quadrature of the unnormalized density over a box wide enough that the
// Gaussian tails are negligible at every memory location.
double quadrature_log_partition(const AttnBmModel& model) {
  const int n = model.dim();
  double reach = 0.0;
  for (int mu = 0; mu < model.memories(); ++mu) {
    reach = std::max(reach, model.xi.row(mu).lpNorm<Eigen::Infinity>());
  }
  const double half = reach + 10.0;
  const Vector lo = Vector::Constant(n, -half);
  const Vector hi = Vector::Constant(n, half);
  // Shift by the peak of the integrand for stable magnitudes.
  double shift = 0.0;
  for (int mu = 0; mu < model.memories(); ++mu) {
    shift = std::max(shift,
                     model.beta * 0.5 * model.xi.row(mu).squaredNorm());
  }
  const double value = integrate_box(
      [&](const Vector& v) {
        return std::exp(-model.beta * energy_b(v, model.xi) - shift);
      },
      lo, hi, 1e-10);
  return std::log(value) + shift;
}

CheckResult check_log_partition_quadrature(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 1 + trial % 2;  // keep the box integral cheap here
    const int p = 1 + trial;
    const int beta = 1 + trial % 3;
    const AttnBmModel model =
        make_integer_beta_model(random_memory(p, n, 1.0, rng), beta);
    const double exact = log_partition(model);
    const double numeric = quadrature_log_partition(model);
    worst = std::max(worst, std::abs(exact - numeric) /
                                std::max(1.0, std::abs(numeric)));
  }
  return {"log_partition vs adaptive quadrature", worst < 1e-8,
          "max rel dev " + fmt(worst)};
}

CheckResult check_closed_form_beta1(Rng& rng) {
  // Independent direct summation in long double.
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 5;
    const int n = 1 + trial % 4;
    const AttnBmModel model =
        make_integer_beta_model(random_memory(p, n, 1.5, rng), 1);
    long double acc = 0.0L;
    for (int mu = 0; mu < p; ++mu) {
      acc += std::exp(
          static_cast<long double>(0.5 * model.xi.row(mu).squaredNorm()));
    }
    const long double direct =
        0.5L * n * std::log(2.0L * 3.14159265358979323846264338328L) +
        std::log(acc);
    const double dev = std::abs(log_partition(model) -
                                static_cast<double>(direct));
    worst = std::max(worst, dev);
  }
  return {"unit-temperature closed form vs direct summation", worst < 1e-12,
          "max abs dev " + fmt(worst)};
}

CheckResult check_gradients(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int p = 1 + trial % 3;
    const int n = 1 + trial % 3;
    const int beta = 1 + trial % 2;
    const MemoryMatrix xi = random_memory(p, n, 1.0, rng);
    const Matrix batch = random_memory(3, n, 1.0, rng);
    {
      const Matrix analytic = grad_log_partition(
          make_integer_beta_model(xi, beta));
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& x) {
            return log_partition(make_integer_beta_model(x, beta));
          },
          xi, 1e-5);
      worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff());
    }
    {
      const Matrix analytic =
          grad_nll(batch, make_integer_beta_model(xi, beta));
      const Matrix numeric = finite_diff_grad(
          [&](const Matrix& x) {
            const AttnBmModel m = make_integer_beta_model(x, beta);
            double nll = 0.0;
            for (int i = 0; i < batch.rows(); ++i) {
              nll -= log_likelihood(batch.row(i).transpose(), m);
            }
            return nll / batch.rows();
          },
          xi, 1e-5);
      worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff());
    }
  }
  return {"partition/likelihood gradients vs finite differences",
          worst < 1e-5, "max abs dev " + fmt(worst)};
}

CheckResult check_gmm_identity(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int p = 1 + trial % 3;
    const int n = 1 + trial % 4;
    const int beta = 1 + trial % 3;
    const AttnBmModel model =
        make_integer_beta_model(random_memory(p, n, 1.0, rng), beta);
    const GaussianMixture gmm = to_gmm(model);
    for (int k = 0; k < 25; ++k) {
      Vector v(n);
      for (int j = 0; j < n; ++j) v[j] = gauss(rng);
      const double a = log_likelihood(v, model);
      const double b = gmm_log_density(gmm, v);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  }
  return {"model density equals its mixture form", worst < 1e-10,
          "max rel dev " + fmt(worst)};
}

CheckResult check_beta_expansion(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.5);
  double worst = 0.0;
  for (int beta = 2; beta <= 3; ++beta) {
    const int n = 2;
    const AttnBmModel model =
        make_integer_beta_model(random_memory(2, n, 1.0, rng), beta);
    const ExpandedModel expanded = expand_beta(model);
    const AttnBmModel flat = make_integer_beta_model(expanded.xi, 1);
    for (int k = 0; k < 50; ++k) {
      Vector v(n);
      for (int j = 0; j < n; ++j) v[j] = gauss(rng);
      const double lhs = log_likelihood(v, model);
      const double rhs = 0.5 * n * std::log(expanded.scale) +
                         log_likelihood(std::sqrt(expanded.scale) * v, flat);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  return {"temperature expansion change of variables", worst < 1e-8,
          "max rel dev " + fmt(worst)};
}

CheckResult check_jensen_bound(Rng& rng) {
  double worst = 1e300;
  for (int trial = 0; trial < 3; ++trial) {
    const AttnBmModel model =
        make_integer_beta_model(random_memory(2, 1, 1.0, rng), 2 + trial % 2);
    const double bound = jensen_log_partition_bound(model);
    const double numeric = quadrature_log_partition(model);
    worst = std::min(worst, bound - numeric);
  }
  return {"averaged-energy bound dominates log partition", worst >= -1e-9,
          "min margin " + fmt(worst)};
}

CheckResult check_truncation(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_rel = 0.0;
  double worst_sign = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 1 + trial % 6;
    const int n = 1 + trial % 3;
    const GbRbmWeights rbm = gb_rbm_from_memories(random_memory(p, n, 1.0, rng));
    Vector v(n);
    for (int j = 0; j < n; ++j) v[j] = gauss(rng);
    const TruncationGap gap = gb_truncation_gap(rbm, v);
    const double recomposed = gap.attention + gap.higher_order;
    worst_rel = std::max(worst_rel, std::abs(gap.gb - recomposed) /
                                        std::max(1e-300, std::abs(gap.gb)));
    worst_sign = std::min(worst_sign, gap.higher_order);
  }
  const bool pass = worst_rel < 1e-12 && worst_sign >= 0.0;
  return {"binary-hidden expansion splits exactly", pass,
          "max rel dev " + fmt(worst_rel)};
}

CheckResult check_dsm(Rng& rng) {
  const MemoryMatrix xi = random_memory(3, 4, 0.8, rng);
  const Matrix batch = random_memory(5, 4, 1.0, rng);
  const std::uint64_t seed = rng();
  Rng noise(seed);
  const Matrix analytic = dsm_grad(xi, batch, 1.0, noise);
  // Finite differences with the same frozen noise per evaluation.
  const Matrix numeric = finite_diff_grad(
      [&](const Matrix& x) {
        Rng frozen(seed);
        return dsm_objective(x, batch, 1.0, frozen);
      },
      xi, 1e-5);
  const double dev = (analytic - numeric).cwiseAbs().maxCoeff();
  return {"autoencoder objective gradient vs finite differences", dev < 1e-5,
          "max abs dev " + fmt(dev)};
}

CheckResult check_efh_identity(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.2);
  const LagrangianPair pairs[] = {
      {ScalarPotential::square(), ScalarPotential::square()},
      {ScalarPotential::square(), ScalarPotential::abs()},
      {ScalarPotential::softplus(), ScalarPotential::square()},
      {ScalarPotential::power_n(4), ScalarPotential::abs()},
      {ScalarPotential::identity(), ScalarPotential::square()},
  };
  double worst = 0.0;
  for (const LagrangianPair& lag : pairs) {
    const MemoryMatrix xi = random_memory(2, 3, 0.7, rng);
    const EfhSpec spec = to_efh(xi, lag, 1.5);
    for (int k = 0; k < 20; ++k) {
      Vector v(3), h(2);
      for (int j = 0; j < 3; ++j) v[j] = gauss(rng);
      for (int j = 0; j < 2; ++j) h[j] = gauss(rng);
      const double lhs = spec.log_density_unnorm(v, h);
      const double rhs = -1.5 * energy_a(v, h, xi, lag);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return {"harmonium log-density equals scaled joint energy", worst < 1e-10,
          "max abs dev " + fmt(worst)};
}

CheckResult check_efh_gaussian_conditional(Rng& rng) {
  // With both potentials quadratic the hidden conditional is Gaussian with
  // mean = coupling field and variance 1/beta.
  const double beta = 2.0;
  const MemoryMatrix xi = random_memory(2, 2, 0.6, rng);
  const EfhSpec spec =
      to_efh(xi, {ScalarPotential::square(), ScalarPotential::square()}, beta);
  Vector v(2);
  v << 0.4, -1.1;
  const GridDomain grid{-8.0, 8.0, 401};
  double worst = 0.0;
  for (int j = 0; j < 2; ++j) {
    const Conditional1d cond = conditional_hidden(spec, j, v, grid);
    const double mean = xi.row(j).dot(v);
    for (int i = 0; i < grid.points; ++i) {
      const double x = grid.node(i);
      const double closed = std::sqrt(beta / (2.0 * M_PI)) *
                            std::exp(-0.5 * beta * (x - mean) * (x - mean));
      const double gridded = cond.probs[i] / grid.trapezoid_weight(i);
      worst = std::max(worst, std::abs(closed - gridded));
    }
  }
  return {"gridded conditional matches Gaussian closed form", worst < 1e-6,
          "max abs dev " + fmt(worst)};
}

CheckResult check_vmf(Rng& rng) {
  (void)rng;
  // Half-integer closed form and sphere-quadrature normalization.
  const double i_half = std::sqrt(2.0 / (M_PI * 1.0)) * std::sinh(1.0);
  const double dev_bessel = std::abs(bessel_i(0.5, 1.0) - i_half);
  double worst_norm = 0.0;
  for (double kappa : {0.5, 5.0, 20.0}) {
    VmfParams params;
    params.eta.resize(3);
    params.eta << 0.6, -0.8, 0.2;
    params.eta *= kappa / params.eta.norm();
    params.beta = 1.0;
    const double mass = sphere_integral_s2(
        [&](const Vector& u) { return std::exp(vmf_log_density(u, params)); },
        64, 128);
    worst_norm = std::max(worst_norm, std::abs(mass - 1.0));
  }
  const bool pass = dev_bessel < 1e-12 && worst_norm < 1e-6;
  return {"directional density normalizes on the sphere", pass,
          "bessel dev " + fmt(dev_bessel) + ", norm dev " + fmt(worst_norm)};
}

CheckResult check_retrieval_descent(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 2 + trial % 4;
    const int n = 2 + trial % 3;
    const MemoryMatrix xi = random_memory(p, n, 1.2, rng);
    Vector v(n);
    for (int j = 0; j < n; ++j) v[j] = gauss(rng);
    const RetrievalResult r = retrieve(v, xi, 50);
    for (std::size_t t = 1; t < r.energy_trace.size(); ++t) {
      worst = std::max(worst, r.energy_trace[t] - r.energy_trace[t - 1]);
    }
  }
  return {"attention updates never raise the energy", worst <= 1e-9,
          "max energy increase " + fmt(worst)};
}

CheckResult check_conditional_factorization(Rng& rng) {
  // conditional(v_m | v_o) * marginal(v_o) must reproduce the joint, with
  // the marginal computed by independent 1-d quadrature.
  const AttnBmModel model =
      make_integer_beta_model(random_memory(3, 2, 1.0, rng), 1);
  std::normal_distribution<double> gauss(0.0, 1.5);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double vo = gauss(rng);
    const double vm = gauss(rng);
    const double reach = model.xi.cwiseAbs().maxCoeff() + 10.0;
    const double marginal = integrate_adaptive(
        [&](double x) {
          Vector v(2);
          v << vo, x;
          return std::exp(log_likelihood(v, model));
        },
        -reach, reach, 1e-10);
    PartialObservation obs;
    obs.mask = {true, false};
    obs.observed = Vector::Constant(1, vo);
    const GaussianMixture cond = conditional_mixture(model, obs);
    Vector vm_vec(1);
    vm_vec << vm;
    const double joint_from_parts =
        gmm_density(cond, vm_vec) * marginal;
    Vector v(2);
    v << vo, vm;
    const double joint = std::exp(log_likelihood(v, model));
    worst = std::max(worst,
                     std::abs(joint - joint_from_parts) /
                         std::max(1e-300, std::abs(joint)));
  }
  return {"conditional times marginal reproduces the joint", worst < 1e-6,
          "max rel dev " + fmt(worst)};
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> results;
  results.push_back(check_closed_form_beta1(rng));
  results.push_back(check_log_partition_quadrature(rng));
  results.push_back(check_gradients(rng));
  results.push_back(check_gmm_identity(rng));
  results.push_back(check_beta_expansion(rng));
  results.push_back(check_jensen_bound(rng));
  results.push_back(check_truncation(rng));
  results.push_back(check_dsm(rng));
  results.push_back(check_efh_identity(rng));
  results.push_back(check_efh_gaussian_conditional(rng));
  results.push_back(check_vmf(rng));
  results.push_back(check_retrieval_descent(rng));
  results.push_back(check_conditional_factorization(rng));
  return results;
}

}  // namespace attnbm
