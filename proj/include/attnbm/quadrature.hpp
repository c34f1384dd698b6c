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

#ifndef ATTNBM_QUADRATURE_HPP
#define ATTNBM_QUADRATURE_HPP

#include <functional>

#include "attnbm/types.hpp"

namespace attnbm {

/// Adaptive Gauss-Kronrod (G7,K15) with interval bisection. Panels are
/// accepted when the embedded error estimate falls below the mix of
/// absolute and relative tolerances; depth is capped at `max_depth`.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-10,
                          double abs_tol = 0.0, int max_depth = 40);

/// Iterated adaptive quadrature over an axis-aligned box.
double integrate_box(const std::function<double(const Vector&)>& f,
                     const Vector& lo, const Vector& hi,
                     double rel_tol = 1e-9);

/// Integral over the unit sphere S^2 via Gauss-Legendre in cos(theta)
/// crossed with a trapezoid rule in azimuth. Spectrally accurate for
/// smooth integrands.
double sphere_integral_s2(const std::function<double(const Vector&)>& f,
                          int polar_points = 64, int azimuth_points = 128);

/// Central finite differences of a scalar function of a matrix argument.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                        const Matrix& x0, double step = 1e-5);

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on Legendre P_n).
void gauss_legendre(int n, Vector& nodes, Vector& weights);

}  // namespace attnbm

#endif  // ATTNBM_QUADRATURE_HPP
