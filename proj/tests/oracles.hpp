#pragma once

// Test-only reference computations. None of these go through the library's
// superoperator assembly or linear solvers.

#include <cmath>
#include <complex>
#include <vector>

#include "magblock/hilbert.hpp"
#include "magblock/model.hpp"

namespace magblock::oracle {

/// Lindblad right-hand side in operator form:
/// -i[H, rho] + sum_k (C rho C^dag - 1/2 {C^dag C, rho}).
inline ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<ComplexMatrix>& cs,
                                  const ComplexMatrix& rho) {
  const Complex i_unit(0.0, 1.0);
  ComplexMatrix out = -i_unit * (h * rho - rho * h);
  for (const auto& c : cs) {
    const ComplexMatrix cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

struct RelaxationResult {
  ComplexMatrix rho;
  double time = 0.0;
  double last_derivative = 0.0;
};

/// Classical fixed-step RK4 on the operator-form master equation, started from
/// rho0 and run until max|d rho/dt| < deriv_tol or t_max is reached.
inline RelaxationResult relax_rk4(const SystemParams& p, ComplexMatrix rho, double dt,
                                  double deriv_tol, double t_max) {
  const ComplexMatrix h = build_hamiltonian(p).matrix();
  std::vector<ComplexMatrix> cs;
  for (const auto& c : build_collapse_ops(p)) {
    if (c.rate > 0.0) cs.push_back(c.scaled().matrix());
  }
  RelaxationResult r;
  for (double t = 0.0; t < t_max; t += dt) {
    const ComplexMatrix k1 = lindblad_rhs(h, cs, rho);
    r.last_derivative = k1.cwiseAbs().maxCoeff();
    r.time = t;
    if (r.last_derivative < deriv_tol) break;
    const ComplexMatrix k2 = lindblad_rhs(h, cs, rho + 0.5 * dt * k1);
    const ComplexMatrix k3 = lindblad_rhs(h, cs, rho + 0.5 * dt * k2);
    const ComplexMatrix k4 = lindblad_rhs(h, cs, rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  r.rho = rho;
  return r;
}

inline ComplexMatrix vacuum(const SpaceDims& dims) {
  ComplexMatrix rho = ComplexMatrix::Zero(dims.total(), dims.total());
  rho(0, 0) = 1.0;
  return rho;
}

/// g2 from a raw density matrix using Fock-diagonal weights n and n(n-1).
inline double g2_from_matrix(const SpaceDims& dims, const ComplexMatrix& rho) {
  double n = 0.0, pair = 0.0;
  for (int q = 0; q < 2; ++q) {
    for (int k = 0; k <= dims.magnon_cutoff; ++k) {
      const double p = rho(q * dims.magnon_dim() + k, q * dims.magnon_dim() + k).real();
      n += k * p;
      pair += k * (k - 1.0) * p;
    }
  }
  return pair / (n * n);
}

/// Mean-field amplitude of a driven damped linear oscillator.
inline double coherent_amplitude(double xi, double delta, double kappa) {
  return xi / std::sqrt(delta * delta + 0.25 * kappa * kappa);
}

}  // namespace magblock::oracle
