// Copyright 2026 The cfran Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference implementations used only by the tests. Each one computes the
// quantity a different way from the library.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cfran::oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// E[log2(1 + snr |h|^2)] for h ~ CN(0,1): |h|^2 is Exp(1).
inline double rayleigh_ergodic_se(double snr) {
  return simpson([snr](double x) { return std::log2(1.0 + snr * x) * std::exp(-x); }, 0.0, 60.0,
                 200000);
}

/// Gaussian tail by integrating the density.
inline double q_integral(double x) {
  const double kInvSqrt2Pi = 0.3989422804014327;
  return simpson([&](double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }, x, x + 40.0,
                 200000);
}

/// SINR of each stream for the explicit MMSE combiner
/// w_k = (H H^H + s I)^-1 h_k.
inline Eigen::VectorXd explicit_combiner_sinr(const Eigen::MatrixXcd& h, double noise_var) {
  const Eigen::Index k = h.cols();
  Eigen::MatrixXcd r = h * h.adjoint();
  r.diagonal().array() += noise_var;
  const Eigen::MatrixXcd w = r.partialPivLu().solve(h);
  Eigen::VectorXd sinr(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::VectorXcd wi = w.col(i);
    const double signal = std::norm(wi.dot(h.col(i)));
    double interference = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (j != i) interference += std::norm(wi.dot(h.col(j)));
    sinr(i) = signal / (interference + noise_var * wi.squaredNorm());
  }
  return sinr;
}

/// Smallest number of colors for a proper coloring, by exhaustive search.
inline int chromatic_number(int n, const std::vector<std::vector<int>>& adjacency) {
  if (n == 0) return 0;
  std::vector<int> color(n, -1);
  for (int k = 1; k <= n; ++k) {
    std::function<bool(int)> place = [&](int v) {
      if (v == n) return true;
      for (int c = 0; c < k; ++c) {
        bool ok = true;
        for (int u : adjacency[v])
          if (u < v && color[u] == c) ok = false;
        if (!ok) continue;
        color[v] = c;
        if (place(v + 1)) return true;
      }
      color[v] = -1;
      return false;
    };
    if (place(0)) return k;
  }
  return n;
}

}  // namespace cfran::oracle
