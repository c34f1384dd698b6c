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

#ifndef ATTNBM_HOPFIELD_HPP
#define ATTNBM_HOPFIELD_HPP

#include <vector>

#include "attnbm/types.hpp"

namespace attnbm {

/// One attention update: v <- Xi^T softmax(Xi v). The output is the convex
/// combination of memory rows with softmax weights, so it never leaves
/// their convex hull.
Vector update_step(const Vector& v, const MemoryMatrix& xi);

struct RetrievalResult {
  Vector final_state;
  int iterations = 0;                // update steps performed
  std::vector<double> energy_trace;  // energy at start and after each step
};

/// Iterates update_step until successive states move less than `tol`
/// (Euclidean) or `max_iters` is reached. Non-convergence is reported via
/// the iteration count, not an error.
RetrievalResult retrieve(const Vector& v0, const MemoryMatrix& xi,
                         int max_iters = 100, double tol = 1e-8);

}  // namespace attnbm

#endif  // ATTNBM_HOPFIELD_HPP
