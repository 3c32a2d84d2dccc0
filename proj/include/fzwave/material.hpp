#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fzwave {

// Piecewise-constant material description on a uniform mesh of (0, L).
// Coefficients live on elements; displacement fields live on interior nodes.
struct MaterialModel {
  double domain_length = 1.0;
  int n_elements = 0;
  std::vector<double> rho;     // density, one value per element
  std::vector<double> mu;      // shear modulus, one value per element
  std::vector<double> lambda;  // first Lame coefficient, one value per element
  double alpha = 1.0;          // fractional order of the constitutive law
  double tau = 1.0;            // relaxation time

  double h() const { return domain_length / n_elements; }
};

inline void validate_material(const MaterialModel& m) {
  if (!(m.domain_length > 0.0))
    throw std::invalid_argument("domain_length must be positive");
  if (m.n_elements < 2)
    throw std::invalid_argument("mesh needs at least two elements");
  const auto ne = static_cast<std::size_t>(m.n_elements);
  if (m.rho.size() != ne || m.mu.size() != ne || m.lambda.size() != ne)
    throw std::invalid_argument(
        "coefficient arrays must hold one value per element");
  for (int e = 0; e < m.n_elements; ++e) {
    if (!(m.rho[e] > 0.0))
      throw std::invalid_argument("rho must be positive on element " +
                                  std::to_string(e));
    if (!(m.mu[e] > 0.0))
      throw std::invalid_argument("mu must be positive on element " +
                                  std::to_string(e));
    if (!(m.lambda[e] >= 0.0))
      throw std::invalid_argument("lambda must be nonnegative on element " +
                                  std::to_string(e));
  }
  if (!(m.alpha > 0.0 && m.alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(m.tau > 0.0 && m.tau <= 1.0))
    throw std::invalid_argument("tau must lie in (0, 1]");
}

}  // namespace fzwave
