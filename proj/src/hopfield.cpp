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

#include "attnbm/hopfield.hpp"

#include <stdexcept>

#include "attnbm/energy.hpp"

namespace attnbm {

Vector update_step(const Vector& v, const MemoryMatrix& xi) {
  if (v.size() != xi.cols()) {
    throw std::invalid_argument("update_step: dimension mismatch");
  }
  const Vector weights = softmax(xi * v);
  return xi.transpose() * weights;
}

RetrievalResult retrieve(const Vector& v0, const MemoryMatrix& xi,
                         int max_iters, double tol) {
  if (max_iters < 1) throw std::invalid_argument("retrieve: max_iters >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("retrieve: tol must be > 0");
  RetrievalResult result;
  Vector v = v0;
  result.energy_trace.push_back(energy_b(v, xi));
  for (int t = 0; t < max_iters; ++t) {
    Vector next = update_step(v, xi);
    ++result.iterations;
    result.energy_trace.push_back(energy_b(next, xi));
    const double moved = (next - v).norm();
    v = std::move(next);
    if (moved < tol) break;
  }
  result.final_state = std::move(v);
  return result;
}

}  // namespace attnbm
