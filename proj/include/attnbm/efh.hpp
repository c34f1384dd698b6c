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

#ifndef ATTNBM_EFH_HPP
#define ATTNBM_EFH_HPP

#include "attnbm/training.hpp"
#include "attnbm/types.hpp"

namespace attnbm {

/// Convex scalar potentials with matched closed-form derivatives. The
/// hidden layer accepts {identity, square, power_n, softplus}; the visible
/// layer {abs, square}.
enum class PotentialKind { Identity, Square, Power, Softplus, Abs };

struct ScalarPotential {
  PotentialKind kind = PotentialKind::Square;
  int power = 2;  // only used by PotentialKind::Power

  double value(double x) const;
  double deriv(double x) const;

  static ScalarPotential identity();
  static ScalarPotential square();
  static ScalarPotential power_n(int n);  // x^n / n, n >= 2
  static ScalarPotential softplus();
  static ScalarPotential abs();  // subgradient sign(0) := 0
};

struct LagrangianPair {
  ScalarPotential hidden;   // F, summed over hidden units
  ScalarPotential visible;  // G, summed over visible units
};

/// Joint two-layer energy with additive Lagrangians:
///   sum_i (v_i g(v_i) - G(v_i)) + sum_j (h_j f(h_j) - F(h_j))
///   - sum_{ji} f(h_j) xi_{ji} g(v_i).
double energy_a(const Vector& v, const Vector& h, const MemoryMatrix& xi,
                const LagrangianPair& lag);

/// Harmonium view of the joint model: two sufficient statistics per unit,
/// natural parameters that put the inverse temperature on the second
/// statistic, and a coupling restricted to the first-statistic block.
class EfhSpec {
 public:
  EfhSpec(MemoryMatrix xi, LagrangianPair lag, double beta);

  int visible_units() const { return static_cast<int>(xi_.cols()); }
  int hidden_units() const { return static_cast<int>(xi_.rows()); }
  double beta() const { return beta_; }
  const MemoryMatrix& xi() const { return xi_; }
  const LagrangianPair& lagrangians() const { return lag_; }

  // Sufficient statistics (identical across units of a layer).
  double visible_stat(int a, double x) const;  // a in {1,2}
  double hidden_stat(int b, double x) const;   // b in {1,2}
  // Natural parameters and coupling tensor entries.
  double theta(int i, int a) const;
  double lambda(int j, int b) const;
  double coupling(int i, int a, int j, int b) const;

  /// sum theta*r + sum lambda*s + sum J*r*s; equals -beta * energy_a.
  double log_density_unnorm(const Vector& v, const Vector& h) const;

 private:
  MemoryMatrix xi_;
  LagrangianPair lag_;
  double beta_;
};

EfhSpec to_efh(MemoryMatrix xi, LagrangianPair lag, double beta);

/// Uniform grid supporting the one-dimensional conditionals.
struct GridDomain {
  double lo = -6.0;
  double hi = 6.0;
  int points = 64;

  double node(int i) const;
  double spacing() const;
  double trapezoid_weight(int i) const;
};

struct Conditional1d {
  GridDomain grid;
  Vector probs;            // trapezoid-weighted, sums to 1
  bool boundary_ok = true; // edge density below 1e-8 of the peak
};

/// p(h_j | v) discretized on the grid.
Conditional1d conditional_hidden(const EfhSpec& spec, int j, const Vector& v,
                                 const GridDomain& grid);
/// p(v_i | h) discretized on the grid.
Conditional1d conditional_visible(const EfhSpec& spec, int i, const Vector& h,
                                  const GridDomain& grid);

/// Mean of f(h_j) under the gridded conditional p(h_j | v).
double hidden_mean_activation(const EfhSpec& spec, int j, const Vector& v,
                              const GridDomain& grid);

struct GibbsState {
  Vector v;
  Vector h;
  int boundary_warnings = 0;  // conditionals that failed the edge check
};

struct GridOptions {
  GridDomain grid;
  bool auto_expand = true;  // widen (doubling) until the edge check passes
  int max_expansions = 12;
};

/// Block Gibbs sweep: all hidden units given v, then all visible units
/// given the new h. Inverse-CDF sampling on the grid atoms.
GibbsState gibbs_step(const GibbsState& state, const EfhSpec& spec,
                      const GridOptions& opts, Rng& rng);

/// Free energy of a visible state with the hidden layer integrated out on
/// the grid (per-unit factorization).
double grid_free_energy(const EfhSpec& spec, const Vector& v,
                        const GridDomain& grid);

/// Contrastive-divergence estimate of the likelihood gradient for a batch:
/// beta * (<f g>_chain - <f g>_data), a (hidden x visible) matrix. The
/// data-phase hidden expectation is exact on the grid; the chain phase uses
/// k block-Gibbs steps from each data point, with the final hidden factor
/// replaced by its conditional mean.
Matrix cd_gradient_estimate(const Matrix& batch, const EfhSpec& spec, int k,
                            const GridOptions& opts, Rng& rng);

/// CD-k training at enumerable scale (hidden and visible counts <= 8,
/// grid <= 128 points). Follows the same loop contract as sgd_mle; the
/// reported objective is the mean grid free energy per epoch.
TrainReport cd_k(const Matrix& data, const MemoryMatrix& init,
                 const LagrangianPair& lag, double beta, int k,
                 const TrainConfig& cfg, const GridOptions& opts = {});

}  // namespace attnbm

#endif  // ATTNBM_EFH_HPP
