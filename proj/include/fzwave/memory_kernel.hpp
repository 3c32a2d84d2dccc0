#pragma once

#include <stdexcept>
#include <vector>

#include "fzwave/mlf.hpp"

namespace fzwave {

// Product-integration table for the kernel rate -e'. Each weight is the
// exact integral of -e' over one subinterval, taken as a difference of
// kernel values, so the t^{alpha-1} endpoint singularity never meets a
// quadrature rule and the unit L1 bound of the rate survives discretization.
struct KernelTable {
  double alpha = 1.0;
  double gamma = 1.0;
  double dt = 0.0;
  int n_steps = 0;
  std::vector<double> e_samples;  // e(k dt) for k = 0..n_steps
  std::vector<double> weights;    // w_k = e(k dt) - e((k+1) dt)
};

inline KernelTable build_kernel_table(double alpha, double gamma, double dt,
                                      int n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  const KernelParams kp{alpha, gamma};
  KernelTable table;
  table.alpha = alpha;
  table.gamma = gamma;
  table.dt = dt;
  table.n_steps = n_steps;
  table.e_samples.reserve(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k)
    table.e_samples.push_back(e_kernel(k * dt, kp));
  table.weights.reserve(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    const double w = table.e_samples[k] - table.e_samples[k + 1];
    if (w < 0.0)
      throw std::runtime_error("kernel samples lost monotonicity");
    table.weights.push_back(w);
  }
  return table;
}

// (-e' * v)(n dt) for piecewise-constant v; history[k] holds the interval
// average v_{k+1/2} for k = 0..n-1.
inline double convolve(const std::vector<double>& history,
                       const KernelTable& table, int n) {
  if (n < 0 || n > table.n_steps)
    throw std::out_of_range("step index outside the kernel table");
  if (static_cast<int>(history.size()) < n)
    throw std::out_of_range("history is shorter than the requested step");
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += table.weights[n - 1 - k] * history[k];
  return s;
}

}  // namespace fzwave
