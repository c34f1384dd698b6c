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

#ifndef ATTNBM_RECONSTRUCTION_HPP
#define ATTNBM_RECONSTRUCTION_HPP

#include <string>
#include <vector>

#include "attnbm/gmm.hpp"
#include "attnbm/training.hpp"
#include "attnbm/types.hpp"

namespace attnbm {

struct PartialObservation {
  std::vector<bool> mask;  // true = observed
  Vector observed;         // values at the observed coordinates, in order
};

/// Builds an observation from a full vector and a mask.
PartialObservation make_observation(const Vector& v,
                                    const std::vector<bool>& mask);

/// Conditional distribution of the missing coordinates given the observed
/// ones, at unit temperature: a p-component unit-variance mixture with
/// weights softmax(xi_obs^T v_obs + ||xi_miss||^2 / 2) and means xi_miss.
GaussianMixture conditional_mixture(const AttnBmModel& model,
                                    const PartialObservation& obs);

/// Mixture mean of conditional_mixture, i.e. the posterior-weighted average
/// of the memory rows restricted to missing coordinates.
Vector impute_mean(const AttnBmModel& model, const PartialObservation& obs);

/// Reassembles a full length-N vector from observed values and imputed
/// missing values.
Vector reassemble(const PartialObservation& obs, const Vector& imputed);

struct Corrupted {
  Vector values;           // zeroed where dropped
  std::vector<bool> mask;  // true = survived
};

/// Zeroes each coordinate independently with probability drop_prob.
Corrupted corrupt(const Vector& v, double drop_prob, Rng& rng);

double mse(const Vector& a, const Vector& b);

struct SweepConfig {
  TrainConfig train;
  double drop_prob = 0.8;
  int eval_samples = 50;  // corrupted images per sweep entry (capped at P)
  int memories = 100;     // p for every trained model
  int retrieve_iters = 100;
  std::uint64_t eval_seed = 12345;
};

struct SweepRow {
  int sample_count;
  double mse_conditional;
  double mse_hopfield;
};

/// For each requested training-set size P: train a model on the first P
/// rows, corrupt held-in samples, and reconstruct via the conditional mean
/// and via attention-update retrieval. Entries run in parallel (worker count
/// capped by the ATTNBM_THREADS environment variable; 0 or unset = auto).
std::vector<SweepRow> mse_vs_samplesize_sweep(const Matrix& dataset,
                                              const std::vector<int>& sizes,
                                              const SweepConfig& cfg);

/// CSV with header "P,mse_conditional,mse_hopfield".
void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path);

/// Worker count: ATTNBM_THREADS if set to a positive value, else hardware
/// concurrency.
int worker_count();

}  // namespace attnbm

#endif  // ATTNBM_RECONSTRUCTION_HPP
