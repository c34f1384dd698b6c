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

#include <algorithm>
#include <cmath>
#include <vector>

#include "attnbm/energy.hpp"
#include "attnbm/hopfield.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using attnbm::MemoryMatrix;
using attnbm::RetrievalResult;
using attnbm::Rng;
using attnbm::Vector;

namespace {

// Unit-norm rows rescaled to `norm`, redrawn until pairwise well separated.
MemoryMatrix separated_memories(int p, int n, double norm, Rng& rng) {
  MemoryMatrix xi(p, n);
  for (int mu = 0; mu < p; ++mu) {
    for (;;) {
      Vector row = oracle::random_vector(n, 1.0, rng);
      row /= row.norm();
      bool ok = true;
      for (int k = 0; k < mu; ++k) {
        if (std::abs(row.dot(xi.row(k).transpose()) / norm) > 0.5) ok = false;
      }
      if (ok) {
        xi.row(mu) = norm * row.transpose();
        break;
      }
    }
  }
  return xi;
}

}  // namespace

TEST_CASE("update stays in the convex hull of the memories") {
  Rng rng(41);
  const MemoryMatrix xi = oracle::random_memory(4, 3, 1.0, rng);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector v = oracle::random_vector(3, 3.0, rng);
    const Vector next = attnbm::update_step(v, xi);
    for (int j = 0; j < 3; ++j) {
      CHECK(next[j] <= xi.col(j).maxCoeff() + 1e-12);
      CHECK(next[j] >= xi.col(j).minCoeff() - 1e-12);
    }
  }
}

TEST_CASE("update is equivariant under memory permutations") {
  Rng rng(42);
  const MemoryMatrix xi = oracle::random_memory(5, 4, 1.0, rng);
  MemoryMatrix shuffled(5, 4);
  const std::vector<int> perm = {3, 0, 4, 1, 2};
  for (int mu = 0; mu < 5; ++mu) shuffled.row(mu) = xi.row(perm[mu]);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector v = oracle::random_vector(4, 1.5, rng);
    const Vector a = attnbm::update_step(v, xi);
    const Vector b = attnbm::update_step(v, shuffled);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("a single memory is recalled immediately") {
  Rng rng(43);
  MemoryMatrix xi(1, 4);
  xi.row(0) = oracle::random_vector(4, 1.0, rng).transpose();
  const Vector start = oracle::random_vector(4, 2.0, rng);

  const Vector next = attnbm::update_step(start, xi);
  CHECK((next - xi.row(0).transpose()).cwiseAbs().maxCoeff() == 0.0);

  const RetrievalResult r = attnbm::retrieve(start, xi);
  CHECK((r.final_state - xi.row(0).transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.iterations <= 2);
}

TEST_CASE("a fixed point stops after one update") {
  Rng rng(44);
  const MemoryMatrix xi = separated_memories(3, 8, 4.0, rng);
  // Converge first, then restart from the converged state.
  const RetrievalResult first =
      attnbm::retrieve(xi.row(0).transpose(), xi, 200, 1e-12);
  const RetrievalResult again =
      attnbm::retrieve(first.final_state, xi, 200, 1e-8);
  CHECK(again.iterations == 1);
  CHECK((again.final_state - first.final_state).norm() < 1e-8);
}

TEST_CASE("trace bookkeeping: one energy per visited state") {
  Rng rng(45);
  const MemoryMatrix xi = oracle::random_memory(3, 2, 1.0, rng);
  const Vector start = oracle::random_vector(2, 1.0, rng);
  // A denormal tolerance never fires in 7 steps, so all of them run.
  const RetrievalResult r = attnbm::retrieve(start, xi, 7, 1e-300);
  CHECK(r.iterations == 7);
  CHECK(r.energy_trace.size() == 8);
  CHECK_THROWS_AS(attnbm::retrieve(start, xi, 7, 0.0), std::invalid_argument);
  CHECK(r.energy_trace.front() ==
        doctest::Approx(attnbm::energy_b(start, xi)).epsilon(1e-14));
  CHECK(r.energy_trace.back() ==
        doctest::Approx(attnbm::energy_b(r.final_state, xi)).epsilon(1e-14));
}

TEST_CASE("the update never raises the energy") {
  Rng rng(46);
  const MemoryMatrix xi = separated_memories(5, 6, 3.0, rng);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector start = oracle::random_vector(6, 2.0, rng);
    const RetrievalResult r = attnbm::retrieve(start, xi, 50);
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
      CHECK(r.energy_trace[i] <= r.energy_trace[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("well-separated memories are recovered in one step") {
  Rng rng(47);
  const int n = 16, p = 6;
  const MemoryMatrix xi = separated_memories(p, n, 8.0, rng);
  int hits = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const int target = static_cast<int>(rng() % p);
    Vector corrupted = xi.row(target).transpose();
    // Zero out 20% of the coordinates.
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) order[j] = j;
    std::shuffle(order.begin(), order.end(), rng);
    for (int j = 0; j < n / 5; ++j) corrupted[order[j]] = 0.0;
    const Vector once = attnbm::update_step(corrupted, xi);
    const double cosine =
        once.dot(xi.row(target).transpose()) / (once.norm() * xi.row(target).norm());
    if (cosine >= 0.99) ++hits;
  }
  CHECK(hits >= trials * 9 / 10);
}
