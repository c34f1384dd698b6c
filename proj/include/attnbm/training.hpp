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

#ifndef ATTNBM_TRAINING_HPP
#define ATTNBM_TRAINING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "attnbm/energy.hpp"
#include "attnbm/types.hpp"

namespace attnbm {

enum class Objective { ExactMle, Dsm };

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 5;
  int epochs = 100;
  double momentum = 0.0;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  Objective objective = Objective::ExactMle;
  double dsm_noise_std = 1.0;  // corruption kernel width for Objective::Dsm
  int beta = 1;
  std::int64_t tuple_budget = kDefaultTupleBudget;
};

struct TrainReport {
  std::vector<double> objective;  // per-epoch mean objective
  std::vector<double> seconds;    // wall clock per epoch
  MemoryMatrix final_xi;
};

/// i.i.d. normal entries with small standard deviation, keeping the initial
/// softmax weights near uniform.
MemoryMatrix init_memory(int p, int n, Rng& rng, double stddev = 0.01);

/// Stochastic gradient descent on the exact negative log-likelihood. Data
/// rows are samples; minibatches are drawn without replacement from a
/// seeded shuffle each epoch. The reported objective is the mean per-sample
/// negative log-likelihood over the epoch's minibatches.
TrainReport sgd_mle(const Matrix& data, const MemoryMatrix& init,
                    const TrainConfig& cfg);

/// Mean squared reconstruction error of the softmax autoencoder on
/// noise-corrupted inputs: mean over the batch of
/// ||Xi^T softmax(Xi (v + noise_std * eps)) - v||^2.
double dsm_objective(const MemoryMatrix& xi, const Matrix& clean_batch,
                     double noise_std, Rng& rng);

/// Exact gradient of dsm_objective under the same noise draws (call with an
/// identically seeded random source).
Matrix dsm_grad(const MemoryMatrix& xi, const Matrix& clean_batch,
                double noise_std, Rng& rng);

/// Denoising training loop; same loop contract as sgd_mle with fresh
/// corruption noise per minibatch.
TrainReport train_dsm(const Matrix& data, const MemoryMatrix& init,
                      const TrainConfig& cfg);

/// CSV rows "epoch,objective,seconds" with a header line.
void write_report_csv(const TrainReport& report, const std::string& path);

}  // namespace attnbm

#endif  // ATTNBM_TRAINING_HPP
