#pragma once

// Reference evaluator for E_{alpha,beta} on the negative real axis, used only
// by the test suite. Independent of the library path: ~160-digit floating
// point (boost::multiprecision), a plain power series where it is exact
// enough, and the algebraic large-argument expansion beyond, with closed forms
// for alpha in {0.5, 1} as cross-checks. The oracle throws instead of
// returning a value whose internal error estimate exceeds 1e-13.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp_t = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

inline mp_t mp_pi() { return boost::math::constants::pi<mp_t>(); }

// 1/Gamma(z), finite at the poles.
inline mp_t inv_gamma(const mp_t& z) {
  if (z > mp_t(0.25)) return 1 / boost::math::tgamma(z);
  return boost::math::sin_pi(z) * boost::math::tgamma(1 - z) / mp_pi();
}

namespace detail {

struct GammaCache {
  std::map<std::pair<double, double>, std::vector<mp_t>> table;
  // Returns Gamma(alpha k + beta), extending the cached run as needed.
  const mp_t& get(double alpha, double beta, std::size_t k) {
    auto& v = table[{alpha, beta}];
    while (v.size() <= k) {
      const mp_t arg = mp_t(alpha) * static_cast<unsigned>(v.size()) + mp_t(beta);
      v.push_back(boost::math::tgamma(arg));
    }
    return v[k];
  }
};

inline GammaCache& gamma_cache() {
  static GammaCache c;
  return c;
}

// Cached reciprocal-Gamma run 1/Gamma(beta - alpha k), k = 1..n, plus the
// error-envelope Gamma for the asymptotic branch.
struct AsymCoeffs {
  std::vector<mp_t> inv_gamma_run;  // index k-1 holds 1/Gamma(beta - alpha k)
  mp_t envelope_gamma;              // Gamma(alpha(K+1) + 1 - beta)
};

inline const AsymCoeffs& asym_coeffs(double alpha, double beta, int terms) {
  static std::map<std::pair<double, double>, AsymCoeffs> cache;
  auto it = cache.find({alpha, beta});
  if (it == cache.end()) {
    AsymCoeffs c;
    c.inv_gamma_run.reserve(terms);
    for (int k = 1; k <= terms; ++k)
      c.inv_gamma_run.push_back(inv_gamma(mp_t(beta) - mp_t(alpha) * k));
    c.envelope_gamma =
        boost::math::tgamma(mp_t(alpha) * (terms + 1) + 1 - mp_t(beta));
    it = cache.emplace(std::make_pair(alpha, beta), std::move(c)).first;
  }
  return it->second;
}

// Series sum_k x^k / Gamma(alpha k + beta). With 160 digits the cancellation
// budget allows |x|^(1/alpha) up to ~280; the dispatcher stays well inside.
inline mp_t series(double alpha, double beta, const mp_t& x) {
  mp_t sum = 0, power = 1;
  mp_t prev_mag(std::numeric_limits<double>::max());
  for (std::size_t k = 0; k < 20000; ++k) {
    const mp_t term = power / gamma_cache().get(alpha, beta, k);
    sum += term;
    const mp_t mag = abs(term);
    if (k > 2 && mag <= prev_mag && mag < mp_t(1e-60) * (1 + abs(sum))) break;
    prev_mag = mag;
    power *= x;
  }
  return sum;
}

// Algebraic expansion -sum_{k=1}^{150} x^{-k}/Gamma(beta - alpha k). The
// dispatcher only enters here for |x| beyond the series switch, where term
// number 151 is still deep in the decaying phase; its sin-free envelope
// |x|^{-151} Gamma(151 alpha + 1 - beta)/pi bounds the algebraic remainder.
// For alpha > 2/3 an exponentially small component of size
// ~ exp(|x|^{1/alpha} cos(pi/alpha)) also exists on the axis and is checked
// against the accuracy target; the oracle refuses rather than degrade.
inline mp_t asymptotic(double alpha, double beta, const mp_t& x) {
  constexpr int kTerms = 150;
  const AsymCoeffs& coeffs = asym_coeffs(alpha, beta, kTerms);
  mp_t acc = 0, zk = 1;
  for (int k = 1; k <= kTerms; ++k) {
    zk /= x;
    acc += -zk * coeffs.inv_gamma_run[k - 1];
  }
  const mp_t envelope = abs(zk / x) * coeffs.envelope_gamma / mp_pi();
  mp_t estimate = envelope;
  if (alpha > 2.0 / 3.0) {
    const double y = static_cast<double>(abs(x));
    const double re_zeta = std::pow(y, 1.0 / alpha) * std::cos(M_PI / alpha);
    const double exp_term =
        std::exp(std::max(re_zeta, -700.0)) * std::pow(y, (1.0 - beta) / alpha) /
        alpha;
    estimate += mp_t(exp_term);
  }
  if (estimate > mp_t(1e-13) * (1 + abs(acc)))
    throw std::runtime_error(
        "mlf oracle: asymptotic tail did not reach the accuracy target");
  return acc;
}

}  // namespace detail

/// Reference value of E_{alpha,beta}(x) for x <= 0, alpha in (0, 1], beta > 0.
inline double ml_reference(double alpha, double beta, double x) {
  if (!(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && x <= 0.0))
    throw std::invalid_argument("mlf oracle: parameter out of range");
  const mp_t xm(x);
  if (x == 0.0)
    return static_cast<double>(1 / boost::math::tgamma(mp_t(beta)));
  if (alpha == 1.0) {
    if (beta == 1.0) return static_cast<double>(exp(xm));
    if (beta == 2.0) return static_cast<double>((exp(xm) - 1) / xm);
  }
  const double y = -x;
  const double y_switch = std::min(150.0, 0.8 * std::pow(250.0, alpha));
  const mp_t val = (y <= y_switch) ? detail::series(alpha, beta, xm)
                                   : detail::asymptotic(alpha, beta, xm);
  return static_cast<double>(val);
}

/// Closed form for alpha = 1/2: E_{1/2,1}(-y) = exp(y^2) erfc(y).
inline double half_order_closed(double x) {
  const mp_t y = -mp_t(x);
  return static_cast<double>(exp(y * y) * boost::math::erfc(y));
}

/// Closed form for alpha = beta = 1/2: E_{1/2,1/2}(x) = 1/sqrt(pi) + x E_{1/2,1}(x).
inline double half_half_closed(double x) {
  const mp_t y = -mp_t(x);
  const mp_t e1 = exp(y * y) * boost::math::erfc(y);
  return static_cast<double>(1 / sqrt(mp_pi()) + mp_t(x) * e1);
}

/// Reference relaxation kernel e(t) = E_{alpha,1}(-gamma t^alpha) in extended
/// precision (argument formed in multiprecision to avoid double rounding of
/// t^alpha feeding a steep function).
inline double e_reference(double alpha, double gamma, double t) {
  if (t == 0.0) return 1.0;
  const mp_t targ = -mp_t(gamma) * pow(mp_t(t), mp_t(alpha));
  const double y = static_cast<double>(-targ);
  const double y_switch = std::min(150.0, 0.8 * std::pow(250.0, alpha));
  if (alpha == 1.0) return static_cast<double>(exp(targ));
  const mp_t val = (y <= y_switch) ? detail::series(alpha, 1.0, targ)
                                   : detail::asymptotic(alpha, 1.0, targ);
  return static_cast<double>(val);
}

}  // namespace oracle
