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

#include "attnbm/reconstruction.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "attnbm/hopfield.hpp"

namespace attnbm {

namespace {

int count_true(const std::vector<bool>& mask) {
  int n = 0;
  for (bool b : mask) n += b ? 1 : 0;
  return n;
}

void check_split(const AttnBmModel& model, const PartialObservation& obs) {
  if (static_cast<int>(obs.mask.size()) != model.dim()) {
    throw std::invalid_argument("conditional: mask length mismatch");
  }
  const int observed = count_true(obs.mask);
  if (observed == 0 || observed == static_cast<int>(obs.mask.size())) {
    throw std::domain_error(
        "conditional: need at least one observed and one missing coordinate");
  }
  if (obs.observed.size() != observed) {
    throw std::invalid_argument("conditional: observed-value count mismatch");
  }
  if (model.beta != 1.0) {
    throw std::domain_error(
        "conditional: defined at unit temperature (expand the model first)");
  }
}

}  // namespace

PartialObservation make_observation(const Vector& v,
                                    const std::vector<bool>& mask) {
  if (static_cast<int>(mask.size()) != v.size()) {
    throw std::invalid_argument("make_observation: mask length mismatch");
  }
  PartialObservation obs;
  obs.mask = mask;
  obs.observed.resize(count_true(mask));
  int k = 0;
  for (int i = 0; i < v.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) obs.observed[k++] = v[i];
  }
  return obs;
}

GaussianMixture conditional_mixture(const AttnBmModel& model,
                                    const PartialObservation& obs) {
  check_split(model, obs);
  const int p = model.memories();
  const int n = model.dim();
  const int observed = count_true(obs.mask);
  const int missing = n - observed;
  Vector logits(p);
  Matrix means(p, missing);
  for (int mu = 0; mu < p; ++mu) {
    double dot = 0.0;
    double miss_norm2 = 0.0;
    int io = 0, im = 0;
    for (int j = 0; j < n; ++j) {
      const double x = model.xi(mu, j);
      if (obs.mask[static_cast<std::size_t>(j)]) {
        dot += x * obs.observed[io++];
      } else {
        miss_norm2 += x * x;
        means(mu, im++) = x;
      }
    }
    logits[mu] = dot + 0.5 * miss_norm2;
  }
  GaussianMixture gmm;
  gmm.weights = softmax(logits);
  gmm.means = std::move(means);
  gmm.variance = 1.0;
  return gmm;
}

Vector impute_mean(const AttnBmModel& model, const PartialObservation& obs) {
  const GaussianMixture gmm = conditional_mixture(model, obs);
  return gmm.means.transpose() * gmm.weights;
}

Vector reassemble(const PartialObservation& obs, const Vector& imputed) {
  const int n = static_cast<int>(obs.mask.size());
  const int observed = count_true(obs.mask);
  if (obs.observed.size() != observed || imputed.size() != n - observed) {
    throw std::invalid_argument("reassemble: size mismatch");
  }
  Vector out(n);
  int io = 0, im = 0;
  for (int i = 0; i < n; ++i) {
    out[i] = obs.mask[static_cast<std::size_t>(i)] ? obs.observed[io++]
                                                   : imputed[im++];
  }
  return out;
}

Corrupted corrupt(const Vector& v, double drop_prob, Rng& rng) {
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) {
    throw std::invalid_argument("corrupt: drop_prob must lie in [0,1]");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Corrupted out;
  out.values = v;
  out.mask.assign(static_cast<std::size_t>(v.size()), true);
  for (int i = 0; i < v.size(); ++i) {
    if (unit(rng) < drop_prob) {
      out.values[i] = 0.0;
      out.mask[static_cast<std::size_t>(i)] = false;
    }
  }
  return out;
}

double mse(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mse: length mismatch");
  if (a.size() == 0) throw std::invalid_argument("mse: empty vectors");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

int worker_count() {
  if (const char* env = std::getenv("ATTNBM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

SweepRow sweep_entry(const Matrix& dataset, int size, const SweepConfig& cfg) {
  if (size < 1 || size > dataset.rows()) {
    throw std::invalid_argument("sweep: size exceeds dataset");
  }
  const Matrix train_set = dataset.topRows(size);
  Rng init_rng(cfg.train.seed);
  const MemoryMatrix init =
      init_memory(cfg.memories, static_cast<int>(dataset.cols()), init_rng);
  const TrainReport report = cfg.train.objective == Objective::Dsm
                                 ? train_dsm(train_set, init, cfg.train)
                                 : sgd_mle(train_set, init, cfg.train);
  const AttnBmModel model =
      make_integer_beta_model(report.final_xi, cfg.train.beta);

  Rng eval_rng(cfg.eval_seed);
  const int evals = std::min(cfg.eval_samples, size);
  double total_cond = 0.0;
  double total_hop = 0.0;
  for (int i = 0; i < evals; ++i) {
    const Vector truth = train_set.row(i).transpose();
    Corrupted c = corrupt(truth, cfg.drop_prob, eval_rng);
    // The conditional needs both sides of the split to be nonempty.
    while (count_true(c.mask) == 0 ||
           count_true(c.mask) == static_cast<int>(c.mask.size())) {
      c = corrupt(truth, cfg.drop_prob, eval_rng);
    }
    PartialObservation obs;
    obs.mask = c.mask;
    obs.observed.resize(count_true(c.mask));
    int k = 0;
    for (int j = 0; j < truth.size(); ++j) {
      if (c.mask[static_cast<std::size_t>(j)]) obs.observed[k++] = truth[j];
    }
    const Vector recon_cond = reassemble(obs, impute_mean(model, obs));
    total_cond += mse(recon_cond, truth);
    const RetrievalResult r =
        retrieve(c.values, model.xi, cfg.retrieve_iters);
    total_hop += mse(r.final_state, truth);
  }
  return {size, total_cond / evals, total_hop / evals};
}

}  // namespace

std::vector<SweepRow> mse_vs_samplesize_sweep(const Matrix& dataset,
                                              const std::vector<int>& sizes,
                                              const SweepConfig& cfg) {
  std::vector<SweepRow> rows(sizes.size());
  if (sizes.empty()) return rows;
  const int workers =
      std::min<int>(worker_count(), static_cast<int>(sizes.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      rows[i] = sweep_entry(dataset, sizes[i], cfg);
    }
    return rows;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < sizes.size();
           i = next.fetch_add(1)) {
        try {
          rows[i] = sweep_entry(dataset, sizes[i], cfg);
        } catch (...) {
          std::lock_guard<std::mutex> hold(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out << "P,mse_conditional,mse_hopfield\n";
  char line[128];
  for (const SweepRow& row : rows) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", row.sample_count,
                  row.mse_conditional, row.mse_hopfield);
    out << line;
  }
  if (!out) throw std::runtime_error("write_sweep_csv: write failed");
}

}  // namespace attnbm
