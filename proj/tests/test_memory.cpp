#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fzwave/memory_kernel.hpp"
#include "support/mlf_oracle.hpp"
#include "support/quad_oracle.hpp"

using fzwave::build_kernel_table;
using fzwave::convolve;
using fzwave::KernelTable;

namespace {

// Quadrature reference for int_0^T -e'(s) f(s) ds. The substitution
// w = s^alpha removes the endpoint singularity:
//   int = (gamma/alpha) int_0^{T^alpha} E_{alpha,alpha}(-gamma w) f(w^{1/alpha}) dw.
template <typename F>
double rate_integral(double alpha, double gamma, double T, F f) {
  auto integrand = [&](double w) {
    return oracle::ml_reference(alpha, alpha, -gamma * w) *
           f(std::pow(w, 1.0 / alpha));
  };
  return gamma / alpha *
         oracle::integrate_simpson(integrand, 0.0, std::pow(T, alpha), 1e-12);
}

}  // namespace

TEST_CASE("kernel table weights are positive and telescope", "[memory]") {
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    for (double gamma : {0.4, 1.0, 4.0}) {
      for (double dt : {0.1, 0.01}) {
        const KernelTable table = build_kernel_table(alpha, gamma, dt, 200);
        CHECK(table.e_samples[0] == 1.0);
        double sum = 0.0;
        for (int k = 0; k < 200; ++k) {
          CHECK(table.weights[k] >= 0.0);
          CHECK(table.e_samples[k + 1] < table.e_samples[k]);
          sum += table.weights[k];
          CHECK(std::abs(sum - (1.0 - table.e_samples[k + 1])) < 1e-14);
        }
        CHECK(sum <= 1.0 + 1e-13);  // unit bound on the rate's L1 mass
      }
    }
  }
}

TEST_CASE("classical-limit weights decay geometrically", "[memory]") {
  const double dt = 0.05;
  const KernelTable table = build_kernel_table(1.0, 1.0, dt, 100);
  for (int k = 0; k < 100; ++k)
    CHECK(table.weights[k] ==
          Catch::Approx(std::exp(-k * dt) * (1.0 - std::exp(-dt)))
              .epsilon(1e-13));
}

TEST_CASE("first weight matches adaptive quadrature of the rate",
          "[memory][oracle]") {
  const KernelTable table = build_kernel_table(0.5, 1.0, 0.01, 1);
  const double ref =
      rate_integral(0.5, 1.0, 0.01, [](double) { return 1.0; });
  CHECK(std::abs(table.weights[0] - ref) < 1e-10);
}

TEST_CASE("convolving constants telescopes the weights", "[memory]") {
  const KernelTable table = build_kernel_table(0.7, 2.0, 0.02, 400);
  const std::vector<double> ones(400, 1.0), zeros(400, 0.0);
  for (int n : {1, 17, 400}) {
    CHECK(convolve(zeros, table, n) == 0.0);
    CHECK(std::abs(convolve(ones, table, n) - (1.0 - table.e_samples[n])) <
          1e-13);
  }
}

TEST_CASE("convolution of a ramp matches the quadrature oracle",
          "[memory][oracle]") {
  // v(t) = t, evaluated at t_n = 1: (-e' * v)(1) = int_0^1 -e'(s) (1-s) ds.
  const double dt = 1e-3;
  const KernelTable table = build_kernel_table(0.5, 1.0, dt, 1000);
  std::vector<double> history(1000);
  for (int k = 0; k < 1000; ++k) history[k] = (k + 0.5) * dt;
  const double ref =
      rate_integral(0.5, 1.0, 1.0, [](double s) { return 1.0 - s; });
  CHECK(std::abs(convolve(history, table, 1000) - ref) < 1e-4);
}

TEST_CASE("convolution error decays at first order or better", "[memory]") {
  // Smooth v(t) = sin t at fixed t = 1, against the quadrature reference.
  const double ref =
      rate_integral(0.6, 1.5, 1.0, [](double s) { return std::sin(1.0 - s); });
  auto error_at = [&](int n) {
    const double dt = 1.0 / n;
    const KernelTable table = build_kernel_table(0.6, 1.5, dt, n);
    std::vector<double> history(n);
    for (int k = 0; k < n; ++k) history[k] = std::sin((k + 0.5) * dt);
    return std::abs(convolve(history, table, n) - ref);
  };
  const double coarse = error_at(100), fine = error_at(200);
  const double order = std::log2(coarse / fine);
  INFO("errors " << coarse << " -> " << fine << ", order " << order);
  CHECK(order >= 0.9);
}

TEST_CASE("running convolution obeys the discrete Young inequality",
          "[memory]") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double alpha : {0.4, 0.9}) {
    const int n = 64;
    const double dt = 0.03;
    const KernelTable table = build_kernel_table(alpha, 1.0, dt, n);
    double weight_mass = 0.0;
    for (double w : table.weights) weight_mass += w;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v(n);
      for (double& x : v) x = unif(rng);
      double conv_sq = 0.0, v_sq = 0.0;
      for (int k = 0; k < n; ++k) {
        const double c = convolve(v, table, k + 1);
        conv_sq += c * c * dt;
        v_sq += v[k] * v[k] * dt;
      }
      CHECK(std::sqrt(conv_sq) <=
            weight_mass * std::sqrt(v_sq) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("kernel table rejects invalid requests", "[memory][errors]") {
  CHECK_THROWS_AS(build_kernel_table(0.5, 1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel_table(0.5, 1.0, -0.1, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_kernel_table(0.5, 1.0, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel_table(1.5, 1.0, 0.1, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_kernel_table(0.5, -1.0, 0.1, 10),
                  std::invalid_argument);

  const KernelTable table = build_kernel_table(0.5, 1.0, 0.1, 10);
  const std::vector<double> history(10, 1.0);
  CHECK_THROWS_AS(convolve(history, table, 11), std::out_of_range);
  CHECK_THROWS_AS(convolve(history, table, -1), std::out_of_range);
  CHECK_THROWS_AS(convolve(std::vector<double>(3, 1.0), table, 5),
                  std::out_of_range);
}
