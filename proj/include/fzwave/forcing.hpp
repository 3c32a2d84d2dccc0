#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fzwave/material.hpp"
#include "fzwave/memory_kernel.hpp"
#include "fzwave/spatial.hpp"

namespace fzwave {

// Per-element derivative of a piecewise-linear field with pinned endpoints.
inline std::vector<double> element_slopes(const NodalField& field, int n_elements,
                                          double h) {
  if (static_cast<int>(field.size()) != n_elements - 1)
    throw std::invalid_argument("field length does not match the mesh");
  std::vector<double> slopes(n_elements, 0.0);
  for (int e = 0; e < n_elements; ++e) {
    const double left = e == 0 ? 0.0 : field[e - 1];
    const double right = e == n_elements - 1 ? 0.0 : field[e];
    slopes[e] = (right - left) / h;
  }
  return slopes;
}

struct InitialData {
  NodalField g;           // initial displacement, interior nodes
  NodalField h;           // initial velocity, interior nodes
  std::vector<double> s;  // initial stress, one value per element
  // Derive the initial stress from g so the stress offset vanishes.
  bool hookean_stress = false;
};

inline void validate_initial_data(const InitialData& d, const MaterialModel& m) {
  const auto interior = static_cast<std::size_t>(m.n_elements - 1);
  if (d.g.size() != interior || d.h.size() != interior)
    throw std::invalid_argument("initial fields must live on interior nodes");
  if (!d.hookean_stress &&
      d.s.size() != static_cast<std::size_t>(m.n_elements))
    throw std::invalid_argument("initial stress needs one value per element");
}

// The initial stress actually imposed: the stored s, or the elastic stress
// of g when hookean_stress is set.
inline std::vector<double> effective_stress(const InitialData& d,
                                            const MaterialModel& m) {
  validate_material(m);
  validate_initial_data(d, m);
  if (!d.hookean_stress) return d.s;
  const double ta = std::pow(m.tau, m.alpha);
  const auto slopes = element_slopes(d.g, m.n_elements, m.h());
  std::vector<double> s(m.n_elements);
  for (int e = 0; e < m.n_elements; ++e)
    s[e] = (2.0 * m.mu[e] + m.lambda[e]) * slopes[e] / ta;
  return s;
}

// Stress offset kappa0 = tau^alpha s - (2 mu + lambda) g'.
inline std::vector<double> compute_kappa0(const InitialData& d,
                                          const MaterialModel& m) {
  validate_material(m);
  validate_initial_data(d, m);
  if (d.hookean_stress) return std::vector<double>(m.n_elements, 0.0);
  const double ta = std::pow(m.tau, m.alpha);
  const auto slopes = element_slopes(d.g, m.n_elements, m.h());
  std::vector<double> kappa(m.n_elements);
  for (int e = 0; e < m.n_elements; ++e)
    kappa[e] = ta * d.s[e] - (2.0 * m.mu[e] + m.lambda[e]) * slopes[e];
  return kappa;
}

// Separable body load F(t, x) = time_factor(t) * profile(x); every bundled
// preset has this form. Empty functions mean no load.
struct LoadSpec {
  std::function<double(double)> time_factor;
  std::function<double(double)> profile;

  bool is_zero() const { return !time_factor || !profile; }
};

// Modal source samples split into the four constitutive terms, plus the
// running integrals the Volterra stepper actually consumes. With alpha < 1
// the velocity term diverges like t^{alpha-1} at t = 0, so its t = 0 sample
// is recorded as 0; the integrals never touch that sample.
struct ModalSource {
  double dt = 0.0;
  int n_steps = 0;
  std::vector<std::vector<double>> t1, t2, t3, t4;  // [mode][step]
  std::vector<std::vector<double>> integral;        // [mode][step]
  std::vector<double> h_m;  // weighted-mass pairing of the initial velocity
  std::vector<double> k_m;  // pairing of kappa0 with the mode slopes
  std::vector<double> p_m;  // L2 pairing of the load profile
  std::vector<double> theta;  // time-factor samples
  NodalField p_nodal;         // interpolated load profile

  int n_modes() const { return static_cast<int>(integral.size()); }
};

inline ModalSource assemble_modal_source(const InitialData& data,
                                         const LoadSpec& load,
                                         const MaterialModel& model,
                                         const ModalBasis& basis,
                                         const KernelTable& table,
                                         int n_steps) {
  validate_material(model);
  validate_initial_data(data, model);
  if (basis.n_elements != model.n_elements)
    throw std::invalid_argument("basis and model are on different meshes");
  if (n_steps < 1 || n_steps > table.n_steps)
    throw std::invalid_argument("kernel table does not cover the time grid");

  const int n_modes = basis.n_modes();
  const double dt = table.dt;
  const double h = model.h();
  const double ta = std::pow(model.tau, model.alpha);
  const double fac = ta - 1.0;  // tau^alpha - 1 <= 0
  const KernelParams kp{table.alpha, table.gamma};

  ModalSource src;
  src.dt = dt;
  src.n_steps = n_steps;

  src.h_m = project(data.h, basis);
  const auto kappa = compute_kappa0(data, model);
  src.k_m.assign(n_modes, 0.0);
  for (int m = 0; m < n_modes; ++m) {
    const auto slopes = element_slopes(basis.modes[m], model.n_elements, h);
    double s = 0.0;
    for (int e = 0; e < model.n_elements; ++e) s += kappa[e] * slopes[e] * h;
    src.k_m[m] = s;
  }

  // Load profile paired through the unit-density mass matrix.
  src.theta.assign(n_steps + 1, 0.0);
  src.p_nodal.assign(model.n_elements - 1, 0.0);
  src.p_m.assign(n_modes, 0.0);
  const bool has_load = !load.is_zero();
  if (has_load) {
    for (int i = 1; i <= model.n_elements - 1; ++i) {
      src.p_nodal[i - 1] = load.profile(i * h);
      if (!std::isfinite(src.p_nodal[i - 1]))
        throw std::invalid_argument("load profile is not finite at node " +
                                    std::to_string(i));
    }
    for (int k = 0; k <= n_steps; ++k) {
      src.theta[k] = load.time_factor(k * dt);
      if (!std::isfinite(src.theta[k]))
        throw std::invalid_argument("load time factor is not finite at step " +
                                    std::to_string(k));
    }
    Tridiag unit_mass;
    unit_mass.diag.assign(model.n_elements - 1, 2.0 * h / 3.0);
    unit_mass.off.assign(model.n_elements - 2, h / 6.0);
    const auto mp = unit_mass.apply(src.p_nodal);
    for (int m = 0; m < n_modes; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < mp.size(); ++i)
        s += basis.modes[m][i] * mp[i];
      src.p_m[m] = s;
    }
  }

  // Kernel-derivative samples and exact cell moments of the kernel itself.
  std::vector<double> edot(n_steps + 1, 0.0);
  std::vector<double> e_int(n_steps + 1, 0.0);
  for (int k = 0; k <= n_steps; ++k) {
    if (k > 0 || table.alpha == 1.0)
      edot[k] = e_kernel_derivative(k * dt, kp);
    e_int[k] = e_kernel_integral(k * dt, kp);
  }

  // Running trapezoid integral of theta and product-integration convolution
  // of the kernel with theta (weights are exact cell integrals of e).
  std::vector<double> theta_int(n_steps + 1, 0.0);
  std::vector<double> conv_theta(n_steps + 1, 0.0);  // (-e' * theta)(t_k)
  std::vector<double> ce_theta(n_steps + 1, 0.0);    // (e * theta)(t_k)
  if (has_load) {
    std::vector<double> theta_mid(n_steps);
    for (int k = 0; k < n_steps; ++k)
      theta_mid[k] = 0.5 * (src.theta[k] + src.theta[k + 1]);
    for (int k = 1; k <= n_steps; ++k) {
      theta_int[k] = theta_int[k - 1] + dt * theta_mid[k - 1];
      conv_theta[k] = convolve(theta_mid, table, k);
      double s = 0.0;
      for (int j = 0; j < k; ++j)
        s += (e_int[k - j] - e_int[k - j - 1]) * theta_mid[j];
      ce_theta[k] = s;
    }
  }

  src.t1.assign(n_modes, std::vector<double>(n_steps + 1, 0.0));
  src.t2 = src.t1;
  src.t3 = src.t1;
  src.t4 = src.t1;
  src.integral = src.t1;
  for (int m = 0; m < n_modes; ++m) {
    for (int k = 0; k <= n_steps; ++k) {
      src.t1[m][k] = fac * edot[k] * src.h_m[m];
      src.t2[m][k] = -table.e_samples[k] * src.k_m[m];
      src.t3[m][k] = ta * src.p_m[m] * src.theta[k];
      src.t4[m][k] = -fac * src.p_m[m] * conv_theta[k];
      src.integral[m][k] = fac * (table.e_samples[k] - 1.0) * src.h_m[m] -
                           e_int[k] * src.k_m[m] +
                           ta * src.p_m[m] * theta_int[k] +
                           fac * src.p_m[m] * (ce_theta[k] - theta_int[k]);
    }
  }
  return src;
}

}  // namespace fzwave
