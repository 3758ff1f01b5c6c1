#pragma once

// Lindblad superoperator on column-stacked density matrices:
// vec(A X B) = (B^T (x) A) vec(X), and entry (i, j) of rho lives at i + j * D.

#include <span>
#include <vector>

#include "magblock/hilbert.hpp"
#include "magblock/model.hpp"

namespace magblock {

class Liouvillian {
 public:
  Liouvillian(SpaceDims dims, ComplexMatrix matrix);

  const SpaceDims& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

  ComplexVector apply(const ComplexVector& vec_rho) const { return matrix_ * vec_rho; }

  /// max |vec(I)^dag L|; zero for a trace-preserving generator.
  double trace_defect() const;

 private:
  SpaceDims dims_;
  ComplexMatrix matrix_;
};

ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexVector& v, int dim);

Liouvillian build_liouvillian(const Operator& h, std::span<const CollapseOp> collapse_ops);
Liouvillian build_liouvillian(const SystemParams& p);

struct SteadyStateOptions {
  double residual_tol = 1e-10;
  /// Smallest-to-largest pivot ratio below which the bordered LU is abandoned
  /// for an SVD null-space solve.
  double rcond_floor = 1e-13;
  /// Relative singular-value threshold used to count null directions.
  double null_tol = 1e-10;
};

struct SteadyStateInfo {
  double residual = 0.0;  ///< max |L vec(rho)| of the returned state
  bool used_svd = false;
};

/// Unique fixed point of L, by replacing the first row of L with the trace
/// functional and solving directly.
DensityMatrix steady_state(const Liouvillian& l, const SteadyStateOptions& opts = {},
                           SteadyStateInfo* info = nullptr);

struct EvolveOptions {
  // Nearly pure states need entry errors well below the 1e-10 positivity floor.
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double min_step = 1e-12;
};

/// Adaptive Dormand-Prince 5(4) integration of d vec(rho)/dt = L vec(rho).
DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& l, double t_final,
                     double dt_max, const EvolveOptions& opts = {});

}  // namespace magblock
