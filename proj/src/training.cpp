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

#include "attnbm/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace attnbm {

namespace {

// Shared evaluation path so that objective and gradient see identical noise
// for identical random-source states.
double dsm_eval(const MemoryMatrix& xi, const Matrix& clean_batch,
                double noise_std, Rng& rng, Matrix* grad_out) {
  if (clean_batch.rows() < 1) {
    throw std::invalid_argument("dsm: empty batch");
  }
  if (clean_batch.cols() != xi.cols()) {
    throw std::invalid_argument("dsm: dimension mismatch");
  }
  if (!(noise_std > 0.0)) {
    throw std::invalid_argument("dsm: noise_std must be positive");
  }
  const int b = static_cast<int>(clean_batch.rows());
  const int n = static_cast<int>(xi.cols());
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (grad_out) grad_out->setZero(xi.rows(), n);
  double total = 0.0;
  Vector noisy(n);
  for (int i = 0; i < b; ++i) {
    const Vector v = clean_batch.row(i).transpose();
    for (int j = 0; j < n; ++j) noisy[j] = v[j] + noise_std * gauss(rng);
    const Vector s = softmax(xi * noisy);
    const Vector r = xi.transpose() * s - v;
    total += r.squaredNorm();
    if (grad_out) {
      // d||r||^2/dXi = 2 [ s r^T + (diag(s) - s s^T) (Xi r) noisy^T ].
      const Vector xr = xi * r;
      const Vector q = s.cwiseProduct(xr) - s * s.dot(xr);
      grad_out->noalias() += 2.0 * (s * r.transpose() + q * noisy.transpose());
    }
  }
  if (grad_out) *grad_out /= static_cast<double>(b);
  return total / static_cast<double>(b);
}

using Clock = std::chrono::steady_clock;

TrainReport run_sgd(const Matrix& data, const MemoryMatrix& init,
                    const TrainConfig& cfg, bool use_dsm) {
  if (data.rows() < 1) throw std::invalid_argument("train: empty dataset");
  if (data.cols() != init.cols()) {
    throw std::invalid_argument("train: data/memory dimension mismatch");
  }
  if (!(cfg.learning_rate >= 0.0)) {
    throw std::invalid_argument("train: learning_rate must be >= 0");
  }
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("train: batch_size must be >= 1");
  }
  if (cfg.epochs < 0) throw std::invalid_argument("train: negative epochs");
  if (use_dsm && !(cfg.dsm_noise_std > 0.0)) {
    throw std::invalid_argument("train: dsm_noise_std must be positive");
  }

  const int samples = static_cast<int>(data.rows());
  Rng rng(cfg.seed);
  MemoryMatrix xi = init;
  Matrix velocity = Matrix::Zero(init.rows(), init.cols());
  std::vector<int> order(static_cast<std::size_t>(samples));
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  report.objective.reserve(static_cast<std::size_t>(cfg.epochs));
  report.seconds.reserve(static_cast<std::size_t>(cfg.epochs));

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
      double objective;
      Matrix grad;
      if (use_dsm) {
        objective = dsm_eval(xi, batch, cfg.dsm_noise_std, rng, &grad);
      } else {
        AttnBmModel model = make_integer_beta_model(xi, cfg.beta);
        grad = grad_nll(batch, model, cfg.tuple_budget);
        const double log_z = log_partition(model, cfg.tuple_budget);
        double mean_energy = 0.0;
        for (int i = 0; i < count; ++i) {
          mean_energy += energy_b(batch.row(i).transpose(), xi);
        }
        mean_energy /= count;
        objective = model.beta * mean_energy + log_z;
      }
      if (!std::isfinite(objective) || !grad.allFinite()) {
        throw std::runtime_error(
            "train: objective diverged (non-finite value; the learning rate "
            "is likely too large)");
      }
      if (cfg.weight_decay != 0.0) grad.noalias() += cfg.weight_decay * xi;
      velocity = cfg.momentum * velocity + grad;
      xi.noalias() -= cfg.learning_rate * velocity;
      // Size-weighted so the epoch value is the exact per-sample mean.
      epoch_objective += objective * count;
    }
    report.objective.push_back(epoch_objective / samples);
    report.seconds.push_back(
        std::chrono::duration<double>(Clock::now() - start).count());
  }
  report.final_xi = std::move(xi);
  return report;
}

}  // namespace

MemoryMatrix init_memory(int p, int n, Rng& rng, double stddev) {
  if (p < 1 || n < 1) throw std::invalid_argument("init_memory: bad shape");
  if (!(stddev >= 0.0)) {
    throw std::invalid_argument("init_memory: negative stddev");
  }
  std::normal_distribution<double> gauss(0.0, stddev);
  MemoryMatrix xi(p, n);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) xi(i, j) = gauss(rng);
  }
  return xi;
}

TrainReport sgd_mle(const Matrix& data, const MemoryMatrix& init,
                    const TrainConfig& cfg) {
  return run_sgd(data, init, cfg, /*use_dsm=*/false);
}

double dsm_objective(const MemoryMatrix& xi, const Matrix& clean_batch,
                     double noise_std, Rng& rng) {
  return dsm_eval(xi, clean_batch, noise_std, rng, nullptr);
}

Matrix dsm_grad(const MemoryMatrix& xi, const Matrix& clean_batch,
                double noise_std, Rng& rng) {
  Matrix grad;
  dsm_eval(xi, clean_batch, noise_std, rng, &grad);
  return grad;
}

TrainReport train_dsm(const Matrix& data, const MemoryMatrix& init,
                      const TrainConfig& cfg) {
  return run_sgd(data, init, cfg, /*use_dsm=*/true);
}

void write_report_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "epoch,objective,seconds\n";
  char line[128];
  for (std::size_t e = 0; e < report.objective.size(); ++e) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.6f\n", e,
                  report.objective[e], report.seconds[e]);
    out << line;
  }
  if (!out) throw std::runtime_error("write_report_csv: write failed");
}

}  // namespace attnbm
