#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fzwave/forcing.hpp"
#include "fzwave/material.hpp"
#include "fzwave/memory_kernel.hpp"
#include "fzwave/spatial.hpp"

namespace fzwave {

enum class TimeScheme { trapezoid, implicit_euler };

struct SchemeConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  TimeScheme scheme = TimeScheme::trapezoid;
  int n_modes = 1;

  int n_steps() const { return static_cast<int>(std::lround(t_final / dt)); }
};

inline void validate_scheme(const SchemeConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.t_final > 0.0))
    throw std::invalid_argument("t_final must be positive");
  if (cfg.n_modes < 1) throw std::invalid_argument("n_modes must be positive");
  const double rounded = std::lround(cfg.t_final / cfg.dt) * cfg.dt;
  if (std::abs(rounded - cfg.t_final) > 1e-12)
    throw std::invalid_argument("t_final must be an integer multiple of dt");
}

// Worker count for per-mode parallelism; FZWAVE_THREADS overrides.
inline int worker_count(int n_tasks) {
  int k = 0;
  if (const char* env = std::getenv("FZWAVE_THREADS")) k = std::atoi(env);
  if (k < 1) {
    const unsigned hw = std::thread::hardware_concurrency();
    k = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return std::min(k, n_tasks);
}

struct ModalTrajectory {
  SchemeConfig cfg;
  MaterialModel model;
  ModalBasis basis;
  // [mode][step]: modal displacement, modal velocity, memory convolution,
  // and the interval averages the convolution was built from.
  std::vector<std::vector<double>> beta, gamma, memory;
  std::vector<std::vector<double>> gamma_mid;  // [mode][step-1]

  double dt() const { return cfg.dt; }
  int n_steps() const { return cfg.n_steps(); }
};

// Integrate, mode by mode, the once-integrated modal system
//   tau^a (gamma(t) - gamma(0)) + (1 - tau^a)(-e' * gamma)(t)
//     + lambda int_0^t beta = int_0^t G,
//   beta(t) = beta(0) + int_0^t gamma,
// with product integration for the memory term and trapezoid (or backward
// Euler) local integrals. Each step solves a scalar equation per mode whose
// pivot tau^a + (1 - tau^a) w_0 c + lambda (dt c)^2 is strictly positive.
inline ModalTrajectory integrate(const MaterialModel& model,
                                 const ModalBasis& basis,
                                 const InitialData& data,
                                 const ModalSource& source,
                                 const KernelTable& table,
                                 const SchemeConfig& cfg) {
  validate_material(model);
  validate_scheme(cfg);
  validate_initial_data(data, model);
  if (basis.n_elements != model.n_elements)
    throw std::invalid_argument("basis and model are on different meshes");
  if (cfg.n_modes > basis.n_modes())
    throw std::invalid_argument("scheme requests more modes than the basis holds");
  const int n_steps = cfg.n_steps();
  if (table.dt != cfg.dt || table.n_steps < n_steps)
    throw std::invalid_argument("kernel table does not match the time grid");
  if (source.dt != cfg.dt || source.n_steps < n_steps ||
      source.n_modes() < cfg.n_modes)
    throw std::invalid_argument("modal source does not match the time grid");

  const int n_modes = cfg.n_modes;
  const double dt = cfg.dt;
  const double ta = std::pow(model.tau, model.alpha);
  const double mem_fac = 1.0 - ta;
  const double c = cfg.scheme == TimeScheme::trapezoid ? 0.5 : 1.0;
  const double w0 = table.weights[0];

  ModalTrajectory traj;
  traj.cfg = cfg;
  traj.model = model;
  traj.basis = basis;
  traj.beta.assign(n_modes, std::vector<double>(n_steps + 1, 0.0));
  traj.gamma = traj.beta;
  traj.memory = traj.beta;
  traj.gamma_mid.assign(n_modes, std::vector<double>(n_steps, 0.0));

  const auto beta0 = project(data.g, basis);
  const auto gamma0 = project(data.h, basis);

  auto step_mode = [&](int m) {
    const double lam = basis.eigenvalues[m];
    const double pivot = ta + mem_fac * w0 * c + lam * dt * dt * c * c;
    auto& beta = traj.beta[m];
    auto& gamma = traj.gamma[m];
    auto& mid = traj.gamma_mid[m];
    beta[0] = beta0[m];
    gamma[0] = gamma0[m];
    double q = 0.0;  // running integral of beta
    for (int n = 1; n <= n_steps; ++n) {
      double conv_known = 0.0;  // memory over fully determined intervals
      for (int k = 0; k + 1 < n; ++k)
        conv_known += table.weights[n - 1 - k] * mid[k];
      const double b_known = beta[n - 1] + dt * (1.0 - c) * gamma[n - 1];
      const double rhs =
          source.integral[m][n] + ta * gamma[0] -
          mem_fac * (conv_known + w0 * (1.0 - c) * gamma[n - 1]) -
          lam * (q + dt * (1.0 - c) * beta[n - 1] + dt * c * b_known);
      gamma[n] = rhs / pivot;
      beta[n] = b_known + dt * c * gamma[n];
      mid[n - 1] = c * gamma[n] + (1.0 - c) * gamma[n - 1];
      traj.memory[m][n] = conv_known + w0 * mid[n - 1];
      q += dt * (c * beta[n] + (1.0 - c) * beta[n - 1]);
      if (!std::isfinite(gamma[n]) || !std::isfinite(beta[n]))
        throw std::runtime_error("integration diverged at step " +
                                 std::to_string(n) + ", mode " +
                                 std::to_string(m));
    }
  };

  const int workers = worker_count(n_modes);
  if (workers <= 1) {
    for (int m = 0; m < n_modes; ++m) step_mode(m);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int m = w; m < n_modes; m += workers) step_mode(m);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }
  return traj;
}

struct Snapshot {
  double time = 0.0;
  NodalField u;
  NodalField u_dot;
  std::vector<double> strain;  // per element
};

inline std::vector<Snapshot> reconstruct_fields(
    const ModalTrajectory& traj, const std::vector<double>& times) {
  const int n_modes = static_cast<int>(traj.beta.size());
  std::vector<Snapshot> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto k = std::lround(t / traj.dt());
    if (k < 0 || k > traj.n_steps() || std::abs(k * traj.dt() - t) > 1e-9)
      throw std::invalid_argument("requested time is not on the time grid");
    std::vector<double> cb(n_modes), cg(n_modes);
    for (int m = 0; m < n_modes; ++m) {
      cb[m] = traj.beta[m][k];
      cg[m] = traj.gamma[m][k];
    }
    Snapshot snap;
    snap.time = k * traj.dt();
    snap.u = reconstruct(cb, traj.basis);
    snap.u_dot = reconstruct(cg, traj.basis);
    snap.strain = element_slopes(snap.u, traj.basis.n_elements, traj.basis.h);
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace fzwave
