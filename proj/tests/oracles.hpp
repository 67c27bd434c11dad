#pragma once

// Reference computations used by the tests. Everything here is written
// against dense linear algebra and plain loops so it shares no code path with
// the library routines it checks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "q3p/pulse.hpp"
#include "q3p/register.hpp"

namespace oracle {

using CVec = Eigen::VectorXcd;

inline double pair_energy(const q3p::Point2& a, const q3p::Point2& b, double c6) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double r2 = dx * dx + dy * dy;
  return c6 / (r2 * r2 * r2);
}

// H = sum_i omega_i X_i - sum_i delta_i n_i + sum_{i<j} C6/r^6 n_i n_j, bit i of
// the basis index = n_i.
inline Eigen::MatrixXd rydberg_hamiltonian(const std::vector<q3p::Point2>& sites, double c6,
                                           const std::vector<double>& omega,
                                           const std::vector<double>& delta) {
  const std::size_t n = sites.size();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((b >> i) & 1)) continue;
      diag -= delta[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((b >> j) & 1) diag += pair_energy(sites[i], sites[j], c6);
      }
    }
    h(b, b) = diag;
    for (std::size_t i = 0; i < n; ++i) h(b ^ (Eigen::Index{1} << i), b) += omega[i];
  }
  return h;
}

inline Eigen::MatrixXd rydberg_hamiltonian(const std::vector<q3p::Point2>& sites, double c6, double omega,
                                           double delta) {
  return rydberg_hamiltonian(sites, c6, std::vector<double>(sites.size(), omega),
                             std::vector<double>(sites.size(), delta));
}

// exp(-i H t) psi by eigendecomposition.
inline CVec propagate(const Eigen::MatrixXd& h, const CVec& psi, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
  CVec c = v.adjoint() * psi;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(std::complex<double>(0.0, -es.eigenvalues()(k) * t));
  return v * c;
}

inline CVec ground(std::size_t qubits) {
  CVec psi = CVec::Zero(Eigen::Index{1} << qubits);
  psi(0) = 1.0;
  return psi;
}

// Time-ordered product of exact midpoint exponentials over `steps` slices.
inline CVec evolve_program(const q3p::Register& reg, const q3p::PulseProgram& pulse, std::size_t steps) {
  const std::size_t n = reg.size();
  CVec psi = ground(n);
  const double dt = pulse.duration() / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = (static_cast<double>(s) + 0.5) * dt;
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = pulse.delta_at(i, t);
    const auto h = rydberg_hamiltonian(reg.sites, reg.c6, std::vector<double>(n, pulse.omega_at(t)), delta);
    psi = propagate(h, psi, dt);
  }
  return psi;
}

// Composite trapezoid on [lo, hi]^2 with n intervals per axis.
inline double trapezoid_2d(const std::function<double(double, double)>& f, double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
      total += wi * wj * f(lo + h * static_cast<double>(i), lo + h * static_cast<double>(j));
    }
  }
  return total * h * h;
}

inline double gauss2(double x, double y, double cx, double cy, double var) {
  return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * var)) / (2.0 * M_PI * var);
}

// Largest independent-set size by plain subset enumeration.
inline std::size_t max_independent_size(std::size_t n, const std::vector<std::uint32_t>& adjacency) {
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if ((s >> i) & 1U) ok = (adjacency[i] & s) == 0;
    }
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(s)));
  }
  return best;
}

}  // namespace oracle
