#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fzwave/evolution.hpp"
#include "fzwave/material.hpp"
#include "fzwave/memory_kernel.hpp"

namespace fzwave {

struct StressSnapshot {
  double time = 0.0;
  std::vector<double> sigma;            // per element
  std::vector<double> hooke_part;       // (2 mu + lambda) u'
  std::vector<double> memory_part;      // strain-history convolution term
  std::vector<double> relaxation_part;  // decaying stress-offset term
};

// Stress reconstruction from the displacement history:
//   tau^a sigma(t) = (1 - tau^a)(e_r' * H)(t) + H(t) + e_r(t) kappa0,
// where H = (2 mu + lambda) u' and e_r is the relaxation kernel at rate
// tau^{-a}. The convolution is product-integrated against a second kernel
// table, so the rate's t^{a-1} singularity is absorbed into exact weights.
// At t = 0 the convolution vanishes and e_r = 1, so tau^a sigma(0) =
// H(g_n) + tau^a s - H(g): with a full modal basis sigma(0) = s exactly.
inline std::vector<StressSnapshot> reconstruct_stress(
    const ModalTrajectory& traj, const std::vector<double>& kappa0,
    const MaterialModel& model, const std::vector<double>& times) {
  validate_material(model);
  if (kappa0.size() != static_cast<std::size_t>(model.n_elements))
    throw std::invalid_argument("kappa0 needs one value per element");
  const int n_modes = static_cast<int>(traj.beta.size());
  const int n_elems = model.n_elements;
  const int n_steps = traj.n_steps();
  const double dt = traj.dt();
  const double h = model.h();
  const double ta = std::pow(model.tau, model.alpha);

  int max_index = 0;
  std::vector<int> indices;
  indices.reserve(times.size());
  for (double t : times) {
    const auto k = std::lround(t / dt);
    if (k < 0 || k > n_steps || std::abs(k * dt - t) > 1e-9)
      throw std::invalid_argument(
          "stress requested at a time the trajectory does not hold");
    indices.push_back(static_cast<int>(k));
    max_index = std::max(max_index, static_cast<int>(k));
  }

  // Hooke-part history per element for every step up to the latest request.
  std::vector<std::vector<double>> mode_slopes(n_modes);
  for (int m = 0; m < n_modes; ++m)
    mode_slopes[m] = element_slopes(traj.basis.modes[m], n_elems, h);
  std::vector<std::vector<double>> hooke(n_elems,
                                         std::vector<double>(max_index + 1));
  for (int k = 0; k <= max_index; ++k)
    for (int e = 0; e < n_elems; ++e) {
      double strain = 0.0;
      for (int m = 0; m < n_modes; ++m)
        strain += traj.beta[m][k] * mode_slopes[m][e];
      hooke[e][k] = (2.0 * model.mu[e] + model.lambda[e]) * strain;
    }

  const KernelTable relax =
      build_kernel_table(model.alpha, std::pow(model.tau, -model.alpha), dt,
                         std::max(max_index, 1));
  const double mem_fac = 1.0 - ta;

  std::vector<StressSnapshot> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int n = indices[i];
    StressSnapshot snap;
    snap.time = n * dt;
    snap.sigma.resize(n_elems);
    snap.hooke_part.resize(n_elems);
    snap.memory_part.resize(n_elems);
    snap.relaxation_part.resize(n_elems);
    for (int e = 0; e < n_elems; ++e) {
      double conv = 0.0;  // ((-e_r') * H)(t_n) by product integration
      for (int k = 0; k < n; ++k)
        conv += relax.weights[n - 1 - k] * 0.5 * (hooke[e][k] + hooke[e][k + 1]);
      snap.memory_part[e] = -mem_fac * conv;
      snap.hooke_part[e] = hooke[e][n];
      snap.relaxation_part[e] = relax.e_samples[n] * kappa0[e];
      snap.sigma[e] =
          (snap.memory_part[e] + snap.hooke_part[e] + snap.relaxation_part[e]) /
          ta;
    }
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace fzwave
