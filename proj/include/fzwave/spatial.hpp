#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fzwave/material.hpp"

namespace fzwave {

// Values at the interior mesh nodes; both endpoints are pinned to zero.
using NodalField = std::vector<double>;

// Symmetric tridiagonal operator on the interior nodes.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples nodes i and i+1

  int size() const { return static_cast<int>(diag.size()); }

  std::vector<double> apply(const std::vector<double>& v) const {
    const int n = size();
    if (static_cast<int>(v.size()) != n)
      throw std::invalid_argument("operator/vector size mismatch");
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
      out[i] = diag[i] * v[i];
      if (i > 0) out[i] += off[i - 1] * v[i - 1];
      if (i + 1 < n) out[i] += off[i] * v[i + 1];
    }
    return out;
  }

  // v^T A w
  double bilinear(const std::vector<double>& v,
                  const std::vector<double>& w) const {
    const int n = size();
    if (static_cast<int>(v.size()) != n || static_cast<int>(w.size()) != n)
      throw std::invalid_argument("operator/vector size mismatch");
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += diag[i] * v[i] * w[i];
      if (i + 1 < n) s += off[i] * (v[i] * w[i + 1] + v[i + 1] * w[i]);
    }
    return s;
  }

  // v^T A v
  double quad(const std::vector<double>& v) const { return bilinear(v, v); }
};

// First n_modes eigenpairs of  stiffness phi = eigenvalue * mass phi,
// normalized so that phi_k^T mass phi_m = delta_km.
struct ModalBasis {
  int n_elements = 0;
  double h = 0.0;
  std::vector<double> eigenvalues;  // ascending, all positive
  std::vector<NodalField> modes;
  Tridiag mass;
  Tridiag stiffness;

  int n_modes() const { return static_cast<int>(modes.size()); }
};

// Exact P1 assembly: element integrals of the piecewise-constant
// coefficients are closed forms, no quadrature error.
inline std::pair<Tridiag, Tridiag> assemble(const MaterialModel& m) {
  validate_material(m);
  const int n = m.n_elements;
  const double h = m.h();
  Tridiag mass, stiff;
  mass.diag.assign(n - 1, 0.0);
  mass.off.assign(n - 2, 0.0);
  stiff.diag.assign(n - 1, 0.0);
  stiff.off.assign(n - 2, 0.0);
  for (int i = 1; i <= n - 1; ++i) {
    // Node i touches elements i-1 and i.
    mass.diag[i - 1] = (m.rho[i - 1] + m.rho[i]) * h / 3.0;
    const double a_left = 2.0 * m.mu[i - 1] + m.lambda[i - 1];
    const double a_right = 2.0 * m.mu[i] + m.lambda[i];
    stiff.diag[i - 1] = (a_left + a_right) / h;
    if (i <= n - 2) {
      mass.off[i - 1] = m.rho[i] * h / 6.0;
      stiff.off[i - 1] = -a_right / h;
    }
  }
  return {std::move(mass), std::move(stiff)};
}

inline ModalBasis solve_eigenpairs(const MaterialModel& m, int n_modes) {
  auto [mass, stiff] = assemble(m);
  const int n = m.n_elements - 1;
  if (n_modes < 1 || n_modes > n)
    throw std::invalid_argument("n_modes must lie in [1, n_elements - 1]");
  if (n > 2048)
    throw std::invalid_argument(
        "dense eigensolver is limited to 2048 interior nodes");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = stiff.diag[i];
    B(i, i) = mass.diag[i];
    if (i + 1 < n) {
      A(i, i + 1) = A(i + 1, i) = stiff.off[i];
      B(i, i + 1) = B(i + 1, i) = mass.off[i];
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      A, B, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(
        "generalized eigensolve did not converge (" + std::to_string(n) +
        " interior nodes, " + std::to_string(n_modes) + " modes requested)");

  ModalBasis basis;
  basis.n_elements = m.n_elements;
  basis.h = m.h();
  basis.mass = std::move(mass);
  basis.stiffness = std::move(stiff);
  basis.eigenvalues.reserve(n_modes);
  basis.modes.reserve(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    basis.eigenvalues.push_back(solver.eigenvalues()[k]);
    NodalField phi(n);
    for (int i = 0; i < n; ++i) phi[i] = solver.eigenvectors()(i, k);
    // Deterministic sign: largest-magnitude component is positive.
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(phi[i]) > std::abs(phi[imax])) imax = i;
    if (phi[imax] < 0.0)
      for (double& x : phi) x = -x;
    basis.modes.push_back(std::move(phi));
  }
  if (!(basis.eigenvalues.front() > 0.0))
    throw std::runtime_error("lowest eigenvalue is not positive");
  return basis;
}

// Modal coefficients c_m = phi_m^T mass field; the reconstruction
// sum c_m phi_m is the mass-orthogonal projection onto the basis span.
inline std::vector<double> project(const NodalField& field,
                                   const ModalBasis& basis) {
  if (static_cast<int>(field.size()) != basis.n_elements - 1)
    throw std::invalid_argument("field length does not match the mesh");
  const std::vector<double> mf = basis.mass.apply(field);
  std::vector<double> coeffs(basis.n_modes(), 0.0);
  for (int k = 0; k < basis.n_modes(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < mf.size(); ++i) s += basis.modes[k][i] * mf[i];
    coeffs[k] = s;
  }
  return coeffs;
}

inline NodalField reconstruct(const std::vector<double>& coeffs,
                              const ModalBasis& basis) {
  if (static_cast<int>(coeffs.size()) > basis.n_modes())
    throw std::invalid_argument("more coefficients than basis modes");
  NodalField out(basis.n_elements - 1, 0.0);
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += coeffs[k] * basis.modes[k][i];
  return out;
}

struct EnergyNorms {
  double l2_rho = 0.0;        // int rho v^2
  double strain_mu = 0.0;     // int 2 mu (v')^2
  double strain_lambda = 0.0; // int lambda (v')^2
};

// Exact per-element integrals for piecewise-linear fields.
inline EnergyNorms energy_norms(const NodalField& field,
                                const MaterialModel& m) {
  validate_material(m);
  if (static_cast<int>(field.size()) != m.n_elements - 1)
    throw std::invalid_argument("field length does not match the mesh");
  const int n = m.n_elements;
  const double h = m.h();
  auto value_at = [&](int i) {
    return (i == 0 || i == n) ? 0.0 : field[i - 1];
  };
  EnergyNorms out;
  for (int e = 0; e < n; ++e) {
    const double a = value_at(e), b = value_at(e + 1);
    const double slope = (b - a) / h;
    out.l2_rho += m.rho[e] * h * (a * a + a * b + b * b) / 3.0;
    out.strain_mu += 2.0 * m.mu[e] * slope * slope * h;
    out.strain_lambda += m.lambda[e] * slope * slope * h;
  }
  return out;
}

}  // namespace fzwave
