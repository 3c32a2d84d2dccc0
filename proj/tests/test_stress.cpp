#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fzwave/forcing.hpp"
#include "fzwave/stress.hpp"
#include "support/l1_caputo.hpp"
#include "support/mlf_oracle.hpp"

using Catch::Matchers::ContainsSubstring;
using fzwave::assemble_modal_source;
using fzwave::build_kernel_table;
using fzwave::compute_kappa0;
using fzwave::element_slopes;
using fzwave::InitialData;
using fzwave::integrate;
using fzwave::KernelTable;
using fzwave::LoadSpec;
using fzwave::MaterialModel;
using fzwave::ModalBasis;
using fzwave::ModalSource;
using fzwave::ModalTrajectory;
using fzwave::NodalField;
using fzwave::project;
using fzwave::reconstruct;
using fzwave::reconstruct_fields;
using fzwave::reconstruct_stress;
using fzwave::SchemeConfig;
using fzwave::solve_eigenpairs;
using fzwave::StressSnapshot;
using fzwave::TimeScheme;

namespace {

MaterialModel layered_model(int n, double alpha, double tau) {
  MaterialModel m;
  m.n_elements = n;
  m.rho.assign(n, 1.0);
  m.mu.assign(n, 0.5);
  m.lambda.assign(n, 0.2);
  for (int e = 0; e < n / 2; ++e) {
    m.rho[e] = 2.0;
    m.mu[e] = 1.25;
    m.lambda[e] = 0.4;
  }
  m.alpha = alpha;
  m.tau = tau;
  return m;
}

struct RunBundle {
  MaterialModel model;
  ModalBasis basis;
  KernelTable table;
  InitialData data;
  ModalTrajectory traj;
  std::vector<double> kappa0;
};

RunBundle run_mesh(const MaterialModel& model, const InitialData& data,
                   int n_modes, double dt, double t_final) {
  RunBundle rb;
  rb.model = model;
  rb.data = data;
  rb.basis = solve_eigenpairs(model, n_modes);
  SchemeConfig cfg;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.n_modes = n_modes;
  rb.table = build_kernel_table(model.alpha, 1.0, dt, cfg.n_steps());
  const ModalSource src = assemble_modal_source(data, LoadSpec{}, model,
                                                rb.basis, rb.table,
                                                cfg.n_steps());
  rb.traj = integrate(model, rb.basis, data, src, rb.table, cfg);
  rb.kappa0 = compute_kappa0(data, model);
  return rb;
}

double hooke_coeff(const MaterialModel& m, int e) {
  return 2.0 * m.mu[e] + m.lambda[e];
}

}  // namespace

TEST_CASE("initial stress is attained exactly with the full modal basis",
          "[stress]") {
  const int n = 16;
  const MaterialModel model = layered_model(n, 0.6, 0.5);
  std::mt19937 rng(4321);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  InitialData data;
  data.g.resize(n - 1);
  data.h.resize(n - 1);
  data.s.resize(n);
  for (auto& x : data.g) x = 0.3 * dist(rng);
  for (auto& x : data.h) x = dist(rng);
  for (auto& x : data.s) x = dist(rng);

  const RunBundle rb = run_mesh(model, data, n - 1, 1e-3, 0.05);
  const auto snaps =
      reconstruct_stress(rb.traj, rb.kappa0, model, {0.0, 0.02, 0.05});

  for (int e = 0; e < n; ++e)
    CHECK_THAT(snaps[0].sigma[e], Catch::Matchers::WithinAbs(data.s[e], 1e-12));

  // The reported parts always recombine into the reported stress.
  const double ta = std::pow(model.tau, model.alpha);
  for (const auto& snap : snaps)
    for (int e = 0; e < n; ++e) {
      const double lhs = ta * snap.sigma[e];
      const double rhs =
          snap.memory_part[e] + snap.hooke_part[e] + snap.relaxation_part[e];
      CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-13));
    }
}

TEST_CASE("truncated bases shift the initial stress by the projection defect",
          "[stress]") {
  const int n = 32;
  const MaterialModel model = layered_model(n, 0.5, 0.25);
  std::mt19937 rng(991);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  InitialData data;
  data.g.resize(n - 1);
  data.h.assign(n - 1, 0.0);
  data.s.resize(n);
  for (int i = 0; i < n - 1; ++i) {
    const double x = double(i + 1) / n;
    data.g[i] = x * x * (1.0 - x) * (1.0 - x) * 16.0;
  }
  for (auto& x : data.s) x = dist(rng);

  const int n_modes = 8;
  const RunBundle rb = run_mesh(model, data, n_modes, 1e-3, 0.01);
  const NodalField g_proj = reconstruct(project(data.g, rb.basis), rb.basis);
  const auto slopes_g = element_slopes(data.g, n, model.h());
  const auto slopes_p = element_slopes(g_proj, n, model.h());
  const double ta = std::pow(model.tau, model.alpha);

  const auto snaps = reconstruct_stress(rb.traj, rb.kappa0, model, {0.0});
  for (int e = 0; e < n; ++e) {
    const double expected =
        data.s[e] + hooke_coeff(model, e) * (slopes_p[e] - slopes_g[e]) / ta;
    CHECK_THAT(snaps[0].sigma[e], Catch::Matchers::WithinAbs(expected, 1e-12));
  }
}

TEST_CASE("tau = 1 with offset-free initial stress gives the elastic law",
          "[stress]") {
  const int n = 24;
  MaterialModel model = layered_model(n, 0.7, 1.0);
  InitialData data;
  data.g.resize(n - 1);
  data.h.resize(n - 1);
  data.hookean_stress = true;
  for (int i = 0; i < n - 1; ++i) {
    const double x = double(i + 1) / n;
    data.g[i] = 0.3 * std::sin(3.14159265358979324 * x);
    data.h[i] = 0.1 * std::sin(2.0 * 3.14159265358979324 * x);
  }

  const RunBundle rb = run_mesh(model, data, 10, 1e-3, 1.0);
  for (double k0 : rb.kappa0) CHECK(k0 == 0.0);

  const std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
  const auto snaps = reconstruct_stress(rb.traj, rb.kappa0, model, times);
  const auto fields = reconstruct_fields(rb.traj, times);
  for (std::size_t j = 0; j < times.size(); ++j)
    for (int e = 0; e < n; ++e) {
      CHECK(snaps[j].memory_part[e] == 0.0);
      CHECK(snaps[j].relaxation_part[e] == 0.0);
      CHECK(snaps[j].sigma[e] == snaps[j].hooke_part[e]);
      CHECK_THAT(snaps[j].sigma[e],
                 Catch::Matchers::WithinAbs(
                     hooke_coeff(model, e) * fields[j].strain[e], 1e-12));
    }
}

TEST_CASE("frozen strain histories follow the closed-form relaxation",
          "[stress][oracle]") {
  // A hand-built trajectory with constant modal displacement makes the
  // product-integrated convolution telescope exactly, so the reconstruction
  // must agree with the constant-strain solution
  //   sigma(t) = [ (1 - tau^a) H (e_r(t) - 1) + H + e_r(t) kappa0 ] / tau^a
  // to roundoff, not just to discretization accuracy.
  auto run_frozen = [](double alpha, double tau, auto e_r) {
    MaterialModel m;
    m.n_elements = 2;
    m.rho.assign(2, 3.0);
    m.mu.assign(2, 0.7);
    m.lambda.assign(2, 0.6);
    m.alpha = alpha;
    m.tau = tau;

    ModalBasis basis;
    basis.n_elements = 2;
    basis.h = 0.5;
    basis.eigenvalues = {5.0};
    basis.modes = {{1.0}};
    basis.mass.diag = {1.0};
    basis.stiffness.diag = {5.0};

    ModalTrajectory traj;
    traj.cfg.dt = 1e-3;
    traj.cfg.t_final = 1.0;
    traj.cfg.n_modes = 1;
    traj.model = m;
    traj.basis = basis;
    const int n = traj.cfg.n_steps();
    traj.beta = {std::vector<double>(n + 1, 0.4)};
    traj.gamma = {std::vector<double>(n + 1, 0.0)};
    traj.memory = {std::vector<double>(n + 1, 0.0)};
    traj.gamma_mid = {std::vector<double>(n, 0.0)};

    const std::vector<double> kappa0 = {0.3, -0.2};
    const double ta = std::pow(tau, alpha);
    const std::vector<double> times = {0.0, 0.1, 0.5, 1.0};
    const auto snaps = reconstruct_stress(traj, kappa0, m, times);
    const auto slopes = element_slopes({0.4}, 2, 0.5);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double er = e_r(times[j]);
      for (int e = 0; e < 2; ++e) {
        const double hk = 2.0 * slopes[e];  // 2 mu + lambda = 2
        const double expected =
            ((1.0 - ta) * hk * (er - 1.0) + hk + er * kappa0[e]) / ta;
        CHECK_THAT(snaps[j].sigma[e],
                   Catch::Matchers::WithinAbs(expected, 1e-11));
      }
    }
  };

  SECTION("exponential kernel") {
    run_frozen(1.0, 0.3, [](double t) { return std::exp(-t / 0.3); });
  }
  SECTION("half-order kernel") {
    const double rate = std::pow(0.4, -0.5);
    run_frozen(0.5, 0.4,
               [rate](double t) { return oracle::e_reference(0.5, rate, t); });
  }
}

TEST_CASE("constitutive residual shrinks under time-step refinement",
          "[stress][oracle]") {
  // Apply an independent first-order fractional-derivative discretization to
  // both sides of  (1 + tau^a D^a) sigma = (1 + D^a) H(u')  along the
  // computed trajectory; the defect must decrease as dt is halved.
  const double alpha = 0.5, tau = 0.5;
  MaterialModel model;
  model.n_elements = 2;
  model.rho.assign(2, 1.0);
  model.mu.assign(2, 1.0);
  model.lambda.assign(2, 0.5);
  model.alpha = alpha;
  model.tau = tau;
  InitialData data;
  data.g = {0.1};
  data.h = {0.0};
  data.hookean_stress = true;

  const double ta = std::pow(tau, alpha);
  const std::vector<double> sample_times = {0.2, 0.6, 1.0, 1.5, 2.0};
  std::vector<double> defect;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const RunBundle rb = run_mesh(model, data, 1, dt, 2.0);
    const int n_steps = rb.traj.n_steps();
    std::vector<double> grid(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) grid[k] = k * dt;
    const auto snaps = reconstruct_stress(rb.traj, rb.kappa0, model, grid);

    double worst = 0.0;
    for (int e = 0; e < 2; ++e) {
      std::vector<double> sigma(n_steps + 1), hooke(n_steps + 1);
      for (int k = 0; k <= n_steps; ++k) {
        sigma[k] = snaps[k].sigma[e];
        hooke[k] = snaps[k].hooke_part[e];
      }
      for (double t : sample_times) {
        const int k = static_cast<int>(std::lround(t / dt));
        const double r = sigma[k] + ta * oracle::l1_caputo(sigma, dt, alpha, k) -
                         hooke[k] - oracle::l1_caputo(hooke, dt, alpha, k);
        worst = std::max(worst, std::abs(r));
      }
    }
    defect.push_back(worst);
  }

  CAPTURE(defect[0], defect[1], defect[2]);
  CHECK(defect[0] > defect[1]);
  CHECK(defect[1] > defect[2]);
}

TEST_CASE("stress requests off the stored grid are rejected",
          "[stress][errors]") {
  const MaterialModel model = layered_model(8, 0.5, 0.5);
  InitialData data;
  data.g.assign(7, 0.1);
  data.h.assign(7, 0.0);
  data.hookean_stress = true;
  const RunBundle rb = run_mesh(model, data, 3, 1e-2, 0.1);

  CHECK_THROWS_MATCHES(
      reconstruct_stress(rb.traj, rb.kappa0, model, {0.25}),
      std::invalid_argument, Catch::Matchers::MessageMatches(
                                 ContainsSubstring("trajectory")));
  CHECK_THROWS_AS(reconstruct_stress(rb.traj, rb.kappa0, model, {-0.01}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reconstruct_stress(rb.traj, rb.kappa0, model, {0.055}),
                  std::invalid_argument);
  const std::vector<double> short_kappa(7, 0.0);
  CHECK_THROWS_AS(reconstruct_stress(rb.traj, short_kappa, model, {0.0}),
                  std::invalid_argument);
}
