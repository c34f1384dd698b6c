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

#include "attnbm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace attnbm {

namespace {

// (G7,K15) nodes/weights on [-1,1]; Kronrod nodes are symmetric, listed for
// x >= 0. Gauss points are the odd-indexed Kronrod points.
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {0.129484966168870, 0.279705391489277,
                                     0.381830050505119, 0.417959183673469};

struct PanelResult {
  double kronrod;
  double error;
};

PanelResult gauss_kronrod_panel(const std::function<double(double)>& f,
                                double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk[15];
  for (int i = 0; i < 7; ++i) {
    fk[i] = f(c - h * kKronrodNodes[i]);
    fk[14 - i] = f(c + h * kKronrodNodes[i]);
  }
  fk[7] = f(c);
  double kr = 0.0;
  for (int i = 0; i < 7; ++i) kr += kKronrodWeights[i] * (fk[i] + fk[14 - i]);
  kr += kKronrodWeights[7] * fk[7];
  kr *= h;
  double g = 0.0;
  for (int i = 0; i < 3; ++i) {
    g += kGaussWeights[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
  }
  g += kGaussWeights[3] * fk[7];
  g *= h;
  double err = std::abs(kr - g);
  // Standard sharpening of the raw embedded estimate.
  err = std::pow(200.0 * err, 1.5);
  return {kr, err};
}

double integrate_recursive(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, double abs_tol,
                           int depth, double whole_scale) {
  PanelResult panel = gauss_kronrod_panel(f, a, b);
  const double tol =
      std::max(abs_tol, rel_tol * std::max(std::abs(panel.kronrod),
                                           whole_scale));
  if (panel.error <= tol || depth <= 0) return panel.kronrod;
  const double c = 0.5 * (a + b);
  return integrate_recursive(f, a, c, rel_tol, 0.5 * abs_tol, depth - 1,
                             whole_scale) +
         integrate_recursive(f, c, b, rel_tol, 0.5 * abs_tol, depth - 1,
                             whole_scale);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, double abs_tol,
                          int max_depth) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: need a < b");
  PanelResult whole = gauss_kronrod_panel(f, a, b);
  const double scale = std::abs(whole.kronrod);
  return integrate_recursive(f, a, b, rel_tol, abs_tol, max_depth, scale);
}

double integrate_box(const std::function<double(const Vector&)>& f,
                     const Vector& lo, const Vector& hi, double rel_tol) {
  const int n = static_cast<int>(lo.size());
  if (hi.size() != n) throw std::invalid_argument("integrate_box: dim mismatch");
  if (n < 1) throw std::invalid_argument("integrate_box: empty domain");
  // Recursion over dimensions: each level integrates out one coordinate.
  Vector point = Vector::Zero(n);
  std::function<double(int)> level = [&](int dim) -> double {
    return integrate_adaptive(
        [&, dim](double x) {
          point[dim] = x;
          if (dim + 1 == n) return f(point);
          return level(dim + 1);
        },
        lo[dim], hi[dim], rel_tol);
  };
  return level(0);
}

void gauss_legendre(int n, Vector& nodes, Vector& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double sphere_integral_s2(const std::function<double(const Vector&)>& f,
                          int polar_points, int azimuth_points) {
  if (polar_points < 2 || azimuth_points < 2) {
    throw std::invalid_argument("sphere_integral_s2: too few points");
  }
  Vector ct, wt;
  gauss_legendre(polar_points, ct, wt);
  const double dphi = 2.0 * M_PI / azimuth_points;
  Vector point(3);
  double total = 0.0;
  for (int i = 0; i < polar_points; ++i) {
    const double cos_t = ct[i];
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    double ring = 0.0;
    for (int j = 0; j < azimuth_points; ++j) {
      const double phi = dphi * j;
      point[0] = sin_t * std::cos(phi);
      point[1] = sin_t * std::sin(phi);
      point[2] = cos_t;
      ring += f(point);
    }
    total += wt[i] * ring * dphi;
  }
  return total;
}

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                        const Matrix& x0, double step) {
  Matrix grad(x0.rows(), x0.cols());
  Matrix x = x0;
  for (int i = 0; i < x0.rows(); ++i) {
    for (int j = 0; j < x0.cols(); ++j) {
      const double saved = x(i, j);
      x(i, j) = saved + step;
      const double fp = f(x);
      x(i, j) = saved - step;
      const double fm = f(x);
      x(i, j) = saved;
      grad(i, j) = (fp - fm) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace attnbm
