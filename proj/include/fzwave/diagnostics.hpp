#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fzwave/evolution.hpp"
#include "fzwave/forcing.hpp"
#include "fzwave/material.hpp"
#include "fzwave/memory_kernel.hpp"
#include "fzwave/spatial.hpp"

namespace fzwave {

// Discrete energy ledger along a trajectory. Kinetic energy comes from the
// modal velocities (the basis is mass-orthonormal, so the modal sum is the
// weighted L2 norm); the strain terms are exact element integrals of the
// reconstructed displacement; dissipation_lb is the provable lower bound on
// the accumulated memory dissipation, nonnegative whenever the kernel
// weights are. a_t collects the data-dependent constant and bound is its
// Gronwall amplification; the inequality under test is
//   kinetic + strain_mu + strain_lambda + dissipation_lb <= bound.
struct EnergyReport {
  std::vector<double> times;
  std::vector<double> kinetic;         // (tau^a / 2) ||u_t||^2_rho
  std::vector<double> strain_mu;       // int mu (u')^2
  std::vector<double> strain_lambda;   // (1/2) int lambda (u')^2
  std::vector<double> dissipation_lb;  // memory dissipation lower bound
  std::vector<double> a_t;             // data constant, nondecreasing in t
  std::vector<double> bound;           // a_t * exp(t + 1 - e(t))
};

inline EnergyReport energy_report(const ModalTrajectory& traj,
                                  const InitialData& data,
                                  const LoadSpec& load,
                                  const MaterialModel& model,
                                  const KernelTable& table) {
  validate_material(model);
  validate_initial_data(data, model);
  if (traj.basis.n_elements != model.n_elements)
    throw std::invalid_argument("trajectory basis does not match the mesh");
  const int n_steps = traj.n_steps();
  const double dt = traj.dt();
  if (std::abs(table.dt - dt) > 1e-12 * dt)
    throw std::invalid_argument("kernel table step does not match the trajectory");
  if (table.n_steps < n_steps)
    throw std::invalid_argument("kernel table does not cover the trajectory");

  const int n_modes = static_cast<int>(traj.beta.size());
  const int n_elems = model.n_elements;
  const double h = model.h();
  const double ta = std::pow(model.tau, model.alpha);
  const double mem_fac = 1.0 - ta;

  EnergyReport rep;
  rep.times.resize(n_steps + 1);
  rep.kinetic.resize(n_steps + 1);
  rep.strain_mu.resize(n_steps + 1);
  rep.strain_lambda.resize(n_steps + 1);
  rep.dissipation_lb.resize(n_steps + 1);
  rep.a_t.resize(n_steps + 1);
  rep.bound.resize(n_steps + 1);

  std::vector<std::vector<double>> mode_slopes(n_modes);
  for (int m = 0; m < n_modes; ++m)
    mode_slopes[m] = element_slopes(traj.basis.modes[m], n_elems, h);

  for (int k = 0; k <= n_steps; ++k) {
    rep.times[k] = k * dt;
    double kin = 0.0;
    for (int m = 0; m < n_modes; ++m)
      kin += traj.gamma[m][k] * traj.gamma[m][k];
    rep.kinetic[k] = 0.5 * ta * kin;
    double smu = 0.0, slam = 0.0;
    for (int e = 0; e < n_elems; ++e) {
      double strain = 0.0;
      for (int m = 0; m < n_modes; ++m)
        strain += traj.beta[m][k] * mode_slopes[m][e];
      smu += model.mu[e] * strain * strain * h;
      slam += 0.5 * model.lambda[e] * strain * strain * h;
    }
    rep.strain_mu[k] = smu;
    rep.strain_lambda[k] = slam;
  }

  // Dissipation lower bound: the quadratic form pairs each interval average
  // of the modal velocities with a symmetrized weight, so every term is a
  // product of nonnegative factors.
  std::vector<double> qbar(n_steps, 0.0);
  for (int i = 0; i < n_steps; ++i)
    for (int m = 0; m < n_modes; ++m)
      qbar[i] += traj.gamma_mid[m][i] * traj.gamma_mid[m][i];
  rep.dissipation_lb[0] = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    double d = 0.0;
    for (int i = 0; i < n; ++i)
      d += (table.weights[n - 1 - i] + table.weights[i]) * qbar[i];
    rep.dissipation_lb[n] = 0.5 * mem_fac * d;
  }

  // Data constant: weighted norms of the initial data and stress offset plus
  // the running load integral.
  const EnergyNorms en_h = energy_norms(data.h, model);
  const EnergyNorms en_g = energy_norms(data.g, model);
  const std::vector<double> kappa0 = compute_kappa0(data, model);
  double kap_norm = 0.0;
  for (int e = 0; e < n_elems; ++e)
    kap_norm += kappa0[e] * kappa0[e] * h / model.mu[e];
  const double c_vel = (ta * ta + mem_fac * mem_fac) / (2.0 * ta);
  const double c_load = 2.0 * c_vel;
  const double a0 = c_vel * en_h.l2_rho + 0.75 * en_g.strain_mu +
                    0.5 * en_g.strain_lambda + 1.5 * kap_norm;

  std::vector<double> load_sq(n_steps + 1, 0.0);  // ||F(t)||^2 weighted by 1/rho
  if (!load.is_zero()) {
    std::vector<double> pn(n_elems - 1);
    for (int i = 0; i < n_elems - 1; ++i) {
      pn[i] = load.profile((i + 1) * h);
      if (!std::isfinite(pn[i]))
        throw std::invalid_argument("load profile is not finite at node " +
                                    std::to_string(i + 1));
    }
    auto value_at = [&](int i) {
      return (i == 0 || i == n_elems) ? 0.0 : pn[i - 1];
    };
    double p2 = 0.0;
    for (int e = 0; e < n_elems; ++e) {
      const double a = value_at(e), b = value_at(e + 1);
      p2 += h * (a * a + a * b + b * b) / (3.0 * model.rho[e]);
    }
    for (int k = 0; k <= n_steps; ++k) {
      const double th = load.time_factor(k * dt);
      if (!std::isfinite(th))
        throw std::invalid_argument("load time factor is not finite at step " +
                                    std::to_string(k));
      load_sq[k] = th * th * p2;
    }
  }
  double load_int = 0.0;
  for (int k = 0; k <= n_steps; ++k) {
    if (k > 0) load_int += 0.5 * dt * (load_sq[k - 1] + load_sq[k]);
    rep.a_t[k] = a0 + c_load * load_int;
    rep.bound[k] = rep.a_t[k] * std::exp(k * dt + 1.0 - table.e_samples[k]);
  }
  return rep;
}

struct InequalityVerdict {
  bool pass = true;
  double max_ratio = 0.0;  // largest (energy + dissipation) / bound
  double worst_time = 0.0;
};

inline InequalityVerdict check_energy_inequality(const EnergyReport& rep,
                                                 double slack = 1.01) {
  InequalityVerdict v;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double lhs = rep.kinetic[k] + rep.strain_mu[k] +
                       rep.strain_lambda[k] + rep.dissipation_lb[k];
    const double ratio =
        rep.bound[k] > 0.0
            ? lhs / rep.bound[k]
            : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > v.max_ratio) {
      v.max_ratio = ratio;
      v.worst_time = rep.times[k];
    }
    if (!(ratio <= slack)) v.pass = false;
  }
  return v;
}

// Relative drift of the conserved part of the energy; meaningful for tau = 1
// runs, where the memory term carries no weight and the trapezoid update is
// exactly energy-preserving.
inline double conservation_drift(const EnergyReport& rep) {
  const double e0 = rep.kinetic[0] + rep.strain_mu[0] + rep.strain_lambda[0];
  double worst = 0.0;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double e = rep.kinetic[k] + rep.strain_mu[k] + rep.strain_lambda[k];
    worst = std::max(worst, std::abs(e - e0));
  }
  if (e0 > 0.0) return worst / e0;
  return worst > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

struct LowerBoundCheck {
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

// Quadratic-form positivity of the discrete memory term: pairing the
// convolution increments with the interval averages that generated them
// dominates the symmetrized-weight lower bound. Exact for nonnegative,
// nonincreasing weights (the difference is a sum of squares), so the slack
// only absorbs roundoff.
inline LowerBoundCheck lemma1_check(const std::vector<double>& v_mid,
                                    const KernelTable& table, int n) {
  if (n < 1 || n > table.n_steps)
    throw std::invalid_argument("step index outside the kernel table");
  if (static_cast<int>(v_mid.size()) < n)
    throw std::invalid_argument("history shorter than the requested step");
  double w_prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double w = table.weights[k];
    if (w < 0.0)
      throw std::invalid_argument(
          "kernel weights must be nonnegative for the dissipation bound");
    if (w > w_prev * (1.0 + 1e-12) + 1e-300)
      throw std::invalid_argument(
          "kernel weights must be nonincreasing for the dissipation bound");
    w_prev = w;
  }

  double lhs = 0.0, c_prev = 0.0, sum_sq = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double c_j = convolve(v_mid, table, j);
    lhs += (c_j - c_prev) * v_mid[j - 1];
    c_prev = c_j;
  }
  double rhs = 0.0;
  for (int i = 0; i < n; ++i) {
    rhs += 0.5 * (table.weights[n - 1 - i] + table.weights[i]) * v_mid[i] *
           v_mid[i];
    sum_sq += v_mid[i] * v_mid[i];
  }
  LowerBoundCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.slack = 1e-9 * (1.0 + table.weights[0] * sum_sq);
  out.pass = lhs >= rhs - out.slack;
  return out;
}

struct ConvolutionNormCheck {
  bool pass = false;
  double lhs = 0.0;  // ||f * g||_r
  double rhs = 0.0;  // ||f||_p ||g||_q
};

namespace detail {

inline double inv_exponent(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

inline double step_norm(const std::vector<double>& f, double dt, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  for (double x : f) s += std::pow(std::abs(x), p);
  return std::pow(dt * s, 1.0 / p);
}

// Exact L^r norm of the piecewise-linear function with the given node
// values; r is restricted to the closed-form cases.
inline double broken_line_norm(const std::vector<double>& c, double dt,
                               double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    const double a = c[k], b = c[k + 1];
    if (r == 2.0) {
      s += dt * (a * a + a * b + b * b) / 3.0;
    } else {  // r == 1, split at the sign change if there is one
      if (a * b >= 0.0)
        s += dt * 0.5 * (std::abs(a) + std::abs(b));
      else
        s += dt * 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
  }
  return r == 2.0 ? std::sqrt(s) : s;
}

}  // namespace detail

// Convolution norm inequality for step functions on a shared grid: the
// convolution of two step functions is a broken line whose node values are
// partial correlation sums, and all three norms have closed forms, so the
// inequality ||f * g||_r <= ||f||_p ||g||_q is checked exactly up to
// roundoff. Exponents must satisfy 1/p + 1/q - 1 = 1/r.
inline ConvolutionNormCheck lemma2_check(const std::vector<double>& f,
                                         const std::vector<double>& g,
                                         double dt, double p, double q,
                                         double r) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (f.empty() || f.size() != g.size())
    throw std::invalid_argument("factors must share a nonempty grid");
  if (!(p >= 1.0) || !(q >= 1.0) || !(r >= 1.0))
    throw std::invalid_argument("exponents must lie in [1, inf]");
  using detail::inv_exponent;
  if (std::abs(inv_exponent(p) + inv_exponent(q) - 1.0 - inv_exponent(r)) >
      1e-12)
    throw std::invalid_argument(
        "exponents must satisfy 1/p + 1/q - 1 = 1/r");
  if (!std::isinf(r) && r != 1.0 && r != 2.0)
    throw std::invalid_argument(
        "convolution norms are implemented for r in {1, 2, inf}");

  const std::size_t n = f.size();
  std::vector<double> conv(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += f[m - 1 - k] * g[k];
    conv[m] = dt * s;
  }

  ConvolutionNormCheck out;
  out.lhs = detail::broken_line_norm(conv, dt, r);
  out.rhs = detail::step_norm(f, dt, p) * detail::step_norm(g, dt, q);
  out.pass = out.lhs <= out.rhs + 1e-12 * (1.0 + out.rhs);
  return out;
}

// Continuous dependence on the data: run the base and the perturbed problem,
// subtract the trajectories arraywise, and require the difference to satisfy
// the energy inequality driven by the perturbation data alone. The modal
// source of the perturbed problem is assembled as the sum of the two source
// tables, which is exact because every source term is linear in the data.
struct PerturbationResult {
  ModalTrajectory difference;
  EnergyReport report;
  InequalityVerdict verdict;
  double peak_energy = 0.0;  // max over the grid of the difference energy
};

inline PerturbationResult perturbation_bound_check(
    const MaterialModel& model, const ModalBasis& basis,
    const KernelTable& table, const SchemeConfig& cfg, const InitialData& base,
    const LoadSpec& base_load, const InitialData& delta,
    const LoadSpec& delta_load) {
  const int n_steps = cfg.n_steps();
  const ModalSource src_base =
      assemble_modal_source(base, base_load, model, basis, table, n_steps);
  const ModalSource src_delta =
      assemble_modal_source(delta, delta_load, model, basis, table, n_steps);

  InitialData perturbed;
  perturbed.g.resize(base.g.size());
  perturbed.h.resize(base.h.size());
  for (std::size_t i = 0; i < base.g.size(); ++i) {
    perturbed.g[i] = base.g[i] + delta.g[i];
    perturbed.h[i] = base.h[i] + delta.h[i];
  }
  const std::vector<double> s_base = effective_stress(base, model);
  const std::vector<double> s_delta = effective_stress(delta, model);
  perturbed.s.resize(s_base.size());
  for (std::size_t e = 0; e < s_base.size(); ++e)
    perturbed.s[e] = s_base[e] + s_delta[e];

  ModalSource src_pert = src_base;
  for (int m = 0; m < src_pert.n_modes(); ++m) {
    for (int k = 0; k <= n_steps; ++k) {
      src_pert.t1[m][k] += src_delta.t1[m][k];
      src_pert.t2[m][k] += src_delta.t2[m][k];
      src_pert.t3[m][k] += src_delta.t3[m][k];
      src_pert.t4[m][k] += src_delta.t4[m][k];
      src_pert.integral[m][k] += src_delta.integral[m][k];
    }
    src_pert.h_m[m] += src_delta.h_m[m];
    src_pert.k_m[m] += src_delta.k_m[m];
    src_pert.p_m[m] += src_delta.p_m[m];
  }

  const ModalTrajectory traj_base =
      integrate(model, basis, base, src_base, table, cfg);
  const ModalTrajectory traj_pert =
      integrate(model, basis, perturbed, src_pert, table, cfg);

  PerturbationResult res;
  res.difference = traj_base;
  for (int m = 0; m < cfg.n_modes; ++m) {
    for (int k = 0; k <= n_steps; ++k) {
      res.difference.beta[m][k] = traj_pert.beta[m][k] - traj_base.beta[m][k];
      res.difference.gamma[m][k] =
          traj_pert.gamma[m][k] - traj_base.gamma[m][k];
      res.difference.memory[m][k] =
          traj_pert.memory[m][k] - traj_base.memory[m][k];
    }
    for (int k = 0; k < n_steps; ++k)
      res.difference.gamma_mid[m][k] =
          traj_pert.gamma_mid[m][k] - traj_base.gamma_mid[m][k];
  }

  InitialData diff_data;
  diff_data.g = delta.g;
  diff_data.h = delta.h;
  diff_data.s = s_delta;
  res.report = energy_report(res.difference, diff_data, delta_load, model, table);
  res.verdict = check_energy_inequality(res.report);
  for (std::size_t k = 0; k < res.report.times.size(); ++k)
    res.peak_energy = std::max(
        res.peak_energy, res.report.kinetic[k] + res.report.strain_mu[k] +
                             res.report.strain_lambda[k]);
  return res;
}

}  // namespace fzwave
