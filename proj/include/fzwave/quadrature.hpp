#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fzwave {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int segments = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half; symmetric).
inline constexpr double kKronrodNodes[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864093, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318920,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
inline constexpr double kGaussWeights[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

template <class F>
inline void gk15(F& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kronrod = kKronrodWeights[7] * f(c);
  double gauss = kGaussWeights[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fsum;
  }
  value = kronrod * h;
  error = std::abs((kronrod - gauss) * h);
}

struct QuadSegment {
  double a, b, value, error;
  bool operator<(const QuadSegment& o) const { return error < o.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
/// `seeds` lists interior points where the domain is pre-split (peaks, grading
/// toward an endpoint with unbounded derivative). Refinement always splits the
/// segment with the largest error estimate, so the result is deterministic.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    double rel_tol,
                                    const std::vector<double>& seeds = {},
                                    int max_segments = 4000) {
  if (!(b > a)) throw std::invalid_argument("integrate_adaptive: requires b > a");
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : seeds)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::QuadSegment> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    detail::QuadSegment s{cuts[i], cuts[i + 1], 0.0, 0.0};
    detail::gk15(f, s.a, s.b, s.value, s.error);
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  int n = static_cast<int>(heap.size());
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         n < max_segments) {
    detail::QuadSegment worst = heap.top();
    heap.pop();
    total -= worst.value;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    for (int half = 0; half < 2; ++half) {
      detail::QuadSegment s{half == 0 ? worst.a : mid, half == 0 ? mid : worst.b,
                            0.0, 0.0};
      detail::gk15(f, s.a, s.b, s.value, s.error);
      total += s.value;
      total_err += s.error;
      heap.push(s);
    }
    ++n;
  }

  QuadratureResult r;
  r.value = total;
  r.error_estimate = total_err;
  r.segments = n;
  r.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
  return r;
}

}  // namespace fzwave
