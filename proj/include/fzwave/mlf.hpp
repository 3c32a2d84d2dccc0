#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fzwave/quadrature.hpp"

namespace fzwave {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MlfParams {
  double alpha = 0.5;  // fractional order, in (0, 1]
  double beta = 1.0;   // second parameter, > 0
};

/// Parameters of the relaxation kernel e(t) = E_{alpha,1}(-gamma t^alpha).
struct KernelParams {
  double alpha = 0.5;  // in (0, 1]
  double gamma = 1.0;  // relaxation rate, > 0
};

namespace detail {

inline void validate_order(double alpha, double beta) {
  if (!std::isfinite(alpha) || !(alpha > 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("ml_eval: alpha must lie in (0, 1]");
  if (!std::isfinite(beta) || !(beta > 0.0))
    throw std::invalid_argument("ml_eval: beta must be positive");
}

// sin(pi z) with exact argument reduction; relative accuracy is kept near the
// zeros, which matters when it multiplies a large Gamma value.
inline double sinpi(double z) {
  const double m = std::round(z);
  const double f = z - m;  // exact
  const double s = std::sin(M_PI * f);
  return (static_cast<long long>(m) % 2 == 0) ? s : -s;
}

// 1/Gamma(z) for any real z; finite everywhere (zero at the poles).
inline double inv_gamma(double z) {
  if (z > 0.25) return 1.0 / std::tgamma(z);
  return std::tgamma(1.0 - z) * sinpi(z) / M_PI;
}

// Power series sum_k x^k / Gamma(alpha k + beta) in compensated long double.
// The dispatcher restricts it to |x| <= min(2, 9^alpha): the largest term of
// the alternating sum grows like exp(|x|^(1/alpha)), so this cap keeps it
// below ~e^9 and the cancellation recoverable in extended precision.
inline double mlf_series(double alpha, double beta, double x) {
  const long double xl = x;
  long double sum = 0.0L, comp = 0.0L;
  long double power = 1.0L;
  long double prev_mag = std::numeric_limits<long double>::max();
  for (int k = 0; k < 2000; ++k) {
    const long double arg = static_cast<long double>(alpha) * k + beta;
    if (arg > 1700.0L) break;  // Gamma overflow; terms are long since negligible
    const long double term = power / tgammal(arg);
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    const long double mag = fabsl(term);
    if (k > 2 && mag <= prev_mag && mag < 1e-25L * (1.0L + fabsl(sum))) break;
    prev_mag = mag;
    power *= xl;
  }
  return static_cast<double>(sum);
}

// alpha = 1: E_{1,1}(x) = exp(x), E_{1,2}(x) = expm1(x)/x; otherwise the
// Kummer transform E_{1,b}(x) = exp(x)/Gamma(b) * M(b-1, b, -x) gives a series
// in y = -x whose terms never blow up relative to the sum, and the far tail
// (y > 600, where exp(x) * M would overflow pairwise) falls back to the
// algebraic expansion -sum_k x^{-k}/Gamma(b - k).
inline double mlf_alpha1(double beta, double x) {
  if (beta == 1.0) return std::exp(x);
  if (beta == 2.0) return x == 0.0 ? 1.0 : std::expm1(x) / x;
  const double y = -x;
  if (y > 600.0) {
    double acc = 0.0, zk = 1.0;
    for (int k = 1; k <= 10; ++k) {
      zk /= x;
      acc -= zk * inv_gamma(beta - k);
    }
    return acc;
  }
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 100000; ++k) {
    term *= y / k;
    const double coeff = (beta - 1.0) / (beta - 1.0 + k);
    sum += coeff * term;
    if (term < 1e-20 * (1.0 + std::abs(sum)) && k > y) break;
  }
  return std::exp(x) * sum / std::tgamma(beta);
}

// Spectral representation on the negative axis: for 0 < alpha < 1, beta <= 1,
// y > 0,
//   E_{alpha,beta}(-y) = integral over r in (0, inf) of
//     (1/(pi alpha)) r^{(1-beta)/alpha} exp(-r^{1/alpha})
//     * [r sin(pi(1-beta)) + y sin(pi(1-beta+alpha))]
//     / ((r + y cos(pi alpha))^2 + (y sin(pi alpha))^2).
// Valid for every y > 0. For alpha > 1/2 the denominator dips near
// r0 = -y cos(pi alpha) (width ~ y sin(pi alpha)); that Lorentzian peak is
// seeded explicitly so the adaptive rule resolves it even as alpha -> 1.
inline double mlf_spectral(double alpha, double beta, double y) {
  const double p = (1.0 - beta) / alpha;  // >= 0 for beta <= 1
  const double s1 = sinpi(1.0 - beta);
  const double s2 = sinpi(1.0 - beta + alpha);
  const double cpa = std::cos(M_PI * alpha);
  const double spa = std::sin(M_PI * alpha);
  const double pref = 1.0 / (M_PI * alpha);
  const double yspa2 = (y * spa) * (y * spa);

  auto integrand = [&](double r) {
    const double shifted = r + y * cpa;
    const double den = shifted * shifted + yspa2;
    const double num = r * s1 + y * s2;
    return pref * std::pow(r, p) * std::exp(-std::pow(r, 1.0 / alpha)) * num /
           den;
  };

  double r_max = std::pow(60.0, alpha);
  std::vector<double> seeds;
  for (double frac : {1e-6, 1e-4, 1e-3, 1e-2, 0.1, 0.3})
    seeds.push_back(r_max * frac);
  if (cpa < 0.0) {
    const double r0 = -y * cpa;
    const double w = y * spa;
    if (std::pow(r0, 1.0 / alpha) < 700.0) {  // peak not yet killed by exp
      r_max = std::max(r_max, r0 + 50.0 * w);
      for (double c : {-30.0, -10.0, -3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0, 10.0, 30.0})
        seeds.push_back(r0 + c * w);
    }
  }
  const auto q = integrate_adaptive(integrand, 0.0, r_max, 1e-17, 3e-15, seeds, 3000);
  return q.value;
}

}  // namespace detail

/// Evaluates E_{alpha,beta}(x) on the closed negative real axis.
///
/// Branches: power series for small |x| (compensated extended precision);
/// exponential/Kummer forms for alpha = 1; the spectral integral otherwise,
/// with beta > 1 first reduced into (1-alpha, 1] by the exact recursion
/// E_{a,b}(x) = 1/Gamma(b) + x E_{a,b+a}(x) so the integrand stays bounded.
/// Absolute accuracy target: 1e-12 on x in [-50, 0].
inline double ml_eval(double alpha, double beta, double x) {
  detail::validate_order(alpha, beta);
  if (!std::isfinite(x) || x > 0.0)
    throw std::domain_error(
        "ml_eval: argument must lie on the negative real axis (x <= 0)");
  if (x == 0.0) return 1.0 / std::tgamma(beta);
  if (alpha == 1.0) return detail::mlf_alpha1(beta, x);
  const double y = -x;
  if (y <= std::min(2.0, std::pow(9.0, alpha)))
    return detail::mlf_series(alpha, beta, x);
  int reductions = 0;
  double b = beta;
  while (b > 1.0 + 1e-14) {
    b -= alpha;
    ++reductions;
  }
  double val = detail::mlf_spectral(alpha, b, y);
  for (int j = 0; j < reductions; ++j) {
    val = (val - 1.0 / std::tgamma(b)) / x;
    b += alpha;
  }
  return val;
}

inline void validate_kernel(const KernelParams& kp) {
  if (!std::isfinite(kp.alpha) || !(kp.alpha > 0.0) || !(kp.alpha <= 1.0))
    throw std::invalid_argument("kernel: alpha must lie in (0, 1]");
  if (!std::isfinite(kp.gamma) || !(kp.gamma > 0.0))
    throw std::invalid_argument("kernel: gamma must be positive");
}

/// Relaxation kernel e(t) = E_{alpha,1}(-gamma t^alpha); e(0) = 1, completely
/// monotone and nonincreasing on t >= 0.
inline double e_kernel(double t, const KernelParams& kp) {
  validate_kernel(kp);
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("e_kernel: requires t >= 0");
  if (t == 0.0) return 1.0;
  return ml_eval(kp.alpha, 1.0, -kp.gamma * std::pow(t, kp.alpha));
}

/// Kernel derivative e'(t) = -gamma t^{alpha-1} E_{alpha,alpha}(-gamma t^alpha).
/// Singular at t = 0 for alpha < 1 (rejected with a domain error); for
/// alpha = 1 it extends continuously with e'(0) = -gamma.
inline double e_kernel_derivative(double t, const KernelParams& kp) {
  validate_kernel(kp);
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("e_kernel_derivative: requires t >= 0");
  if (t == 0.0) {
    if (kp.alpha < 1.0)
      throw std::domain_error(
          "e_kernel_derivative: e' ~ -gamma t^{alpha-1} is singular at t = 0 "
          "for alpha < 1");
    return -kp.gamma;
  }
  return -kp.gamma * std::pow(t, kp.alpha - 1.0) *
         ml_eval(kp.alpha, kp.alpha, -kp.gamma * std::pow(t, kp.alpha));
}

/// Exact running integral of the kernel: int_0^t e = t E_{alpha,2}(-gamma t^alpha).
inline double e_kernel_integral(double t, const KernelParams& kp) {
  validate_kernel(kp);
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("e_kernel_integral: requires t >= 0");
  if (t == 0.0) return 0.0;
  return t * ml_eval(kp.alpha, 2.0, -kp.gamma * std::pow(t, kp.alpha));
}

struct LaplaceCheck {
  double transform = 0.0;   // quadrature of exp(-p t) e(t) over [0, t_max]
  double reference = 0.0;   // p^{alpha-1} / (p^alpha + gamma)
  double tail_bound = 0.0;  // exp(-p t_max)/p; bounds the dropped tail (|e| <= 1)
  double residual = 0.0;    // |transform - reference|
};

/// Compares the truncated Laplace transform of the kernel against its closed
/// form p^{alpha-1}/(p^alpha + gamma). Requires p > gamma^{1/alpha} (the
/// transform's region of absolute convergence for real p).
inline LaplaceCheck laplace_consistency(const KernelParams& kp, double p,
                                        double t_max, double quad_tol) {
  validate_kernel(kp);
  if (!(p > std::pow(kp.gamma, 1.0 / kp.alpha)))
    throw std::invalid_argument(
        "laplace_consistency: requires p > gamma^{1/alpha}");
  if (!(t_max > 0.0))
    throw std::invalid_argument("laplace_consistency: requires t_max > 0");
  auto integrand = [&](double t) { return std::exp(-p * t) * e_kernel(t, kp); };
  // Graded seeds toward t = 0 where the kernel has a t^alpha cusp.
  std::vector<double> seeds;
  for (double s : {1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0})
    if (s < t_max) seeds.push_back(s);
  const auto q =
      integrate_adaptive(integrand, 0.0, t_max, quad_tol * 1e-2, quad_tol * 1e-2, seeds, 4000);
  LaplaceCheck out;
  out.transform = q.value;
  out.reference = std::pow(p, kp.alpha - 1.0) / (std::pow(p, kp.alpha) + kp.gamma);
  out.tail_bound = std::exp(-p * t_max) / p;
  out.residual = std::abs(out.transform - out.reference);
  return out;
}

}  // namespace fzwave
