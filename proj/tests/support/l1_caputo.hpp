#pragma once

#include <cmath>
#include <vector>

namespace oracle {

// L1 discretization of the Caputo derivative of order a in (0, 1]:
//   D^a f(t_n) ~= sum_{k=0}^{n-1} w_k (f_{n-k} - f_{n-k-1}),
//   w_k = ((k+1)^{1-a} - k^{1-a}) / (Gamma(2-a) dt^a).
// First-order-accurate independent discretization, used only to cross-check
// constitutive residuals. At a = 1 it collapses to the backward difference.
inline double l1_caputo(const std::vector<double>& f, double dt, double a,
                        int n) {
  const double scale = 1.0 / (std::tgamma(2.0 - a) * std::pow(dt, a));
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w =
        std::pow(double(k + 1), 1.0 - a) - std::pow(double(k), 1.0 - a);
    acc += w * (f[n - k] - f[n - k - 1]);
  }
  return acc * scale;
}

}  // namespace oracle
