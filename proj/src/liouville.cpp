#include "magblock/liouville.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/KroneckerProduct>

namespace magblock {

Liouvillian::Liouvillian(SpaceDims dims, ComplexMatrix matrix)
    : dims_(dims), matrix_(std::move(matrix)) {
  const int n = dims_.total() * dims_.total();
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw DimensionMismatch("Liouvillian must be " + std::to_string(n) + "x" + std::to_string(n));
  }
}

double Liouvillian::trace_defect() const {
  const int d = dims_.total();
  ComplexVector row = ComplexVector::Zero(size());
  for (int i = 0; i < d; ++i) row += matrix_.row(i + i * d).transpose();
  return row.cwiseAbs().maxCoeff();
}

ComplexVector vectorize(const ComplexMatrix& rho) {
  return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw DimensionMismatch("unvectorize: length does not match dimension");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

Liouvillian build_liouvillian(const Operator& h, std::span<const CollapseOp> collapse_ops) {
  const SpaceDims dims = h.dims();
  const int d = dims.total();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const Complex i_unit(0.0, 1.0);

  ComplexMatrix l = -i_unit * (Eigen::kroneckerProduct(id, h.matrix()).eval() -
                               Eigen::kroneckerProduct(h.matrix().transpose(), id).eval());
  for (const CollapseOp& c : collapse_ops) {
    if (!(c.op.dims() == dims)) {
      throw DimensionMismatch("collapse operator and Hamiltonian act on different spaces");
    }
    if (c.rate < 0.0) {
      throw InvalidParameter("collapse rate must be >= 0");
    }
    if (c.rate == 0.0) continue;
    const ComplexMatrix cm = c.scaled().matrix();
    const ComplexMatrix cdc = cm.adjoint() * cm;
    l += Eigen::kroneckerProduct(cm.conjugate(), cm);
    l -= 0.5 * Eigen::kroneckerProduct(id, cdc).eval();
    l -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval();
  }
  return Liouvillian(dims, std::move(l));
}

Liouvillian build_liouvillian(const SystemParams& p) {
  const auto cs = build_collapse_ops(p);
  return build_liouvillian(build_hamiltonian(p), cs);
}

namespace {

double residual_of(const Liouvillian& l, const ComplexMatrix& rho) {
  return l.apply(vectorize(rho)).cwiseAbs().maxCoeff();
}

ComplexMatrix normalize(const ComplexMatrix& raw) {
  ComplexMatrix rho = 0.5 * (raw + raw.adjoint());
  return rho / rho.trace().real();
}

void hermitize_vec(ComplexVector& v, int d) {
  for (int j = 0; j < d; ++j) {
    v(j + j * d) = v(j + j * d).real();
    for (int i = j + 1; i < d; ++i) {
      const Complex avg = 0.5 * (v(i + j * d) + std::conj(v(j + i * d)));
      v(i + j * d) = avg;
      v(j + i * d) = std::conj(avg);
    }
  }
}

ComplexMatrix null_space_solution(const Liouvillian& l, const SteadyStateOptions& opts) {
  const int d = l.dims().total();
  Eigen::BDCSVD<ComplexMatrix> svd(l.matrix(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(sv(0), 1.0);
  int null_dim = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= opts.null_tol * scale) ++null_dim;
  }
  if (null_dim > 1) {
    throw NonUniqueSteadyState("Liouvillian has a " + std::to_string(null_dim) +
                               "-dimensional null space");
  }
  const ComplexVector v = svd.matrixV().col(sv.size() - 1);
  const ComplexMatrix raw = unvectorize(v, d);
  if (std::abs(raw.trace()) < 1e-14) {
    throw ConvergenceError("null vector of the Liouvillian is traceless");
  }
  return normalize(raw / raw.trace());
}

/// Smallest over largest |U_jj| of a sparse LU factorization.
template <typename Lu>
double pivot_ratio(const Lu& lu) {
  const auto& factor = lu.matrixL().m_mapL;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index j = 0; j < factor.cols(); ++j) {
    double pivot = 0.0;
    for (typename std::decay_t<decltype(factor)>::InnerIterator it(factor, j); it; ++it) {
      if (it.index() == j) {
        pivot = std::abs(it.value());
        break;
      }
    }
    lo = std::min(lo, pivot);
    hi = std::max(hi, pivot);
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& l, const SteadyStateOptions& opts,
                           SteadyStateInfo* info) {
  const int d = l.dims().total();
  const int n = l.size();

  // The diagonal rows of L sum to zero (trace preservation), so row 0 is
  // redundant and can carry the normalization Tr(rho) = 1 instead.
  Eigen::SparseMatrix<Complex> a = l.matrix().sparseView();
  a.prune([](Eigen::Index row, Eigen::Index, const Complex&) { return row != 0; });
  for (int i = 0; i < d; ++i) a.coeffRef(0, i + i * d) = 1.0;
  a.makeCompressed();
  ComplexVector b = ComplexVector::Zero(n);
  b(0) = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  ComplexMatrix rho;
  bool used_svd = false;
  // A numerically singular system still factors, so tiny pivots are rejected.
  if (lu.info() == Eigen::Success && pivot_ratio(lu) > opts.rcond_floor) {
    rho = normalize(unvectorize(lu.solve(b), d));
  }
  if (rho.size() == 0 || !rho.allFinite() || residual_of(l, rho) > opts.residual_tol) {
    rho = null_space_solution(l, opts);
    used_svd = true;
  }

  const double residual = residual_of(l, rho);
  if (residual > opts.residual_tol) {
    throw ConvergenceError("steady-state residual " + format_number(residual) +
                           " exceeds tolerance");
  }
  if (info) {
    info->residual = residual;
    info->used_svd = used_svd;
  }
  return DensityMatrix(l.dims(), std::move(rho));
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& l, double t_final,
                     double dt_max, const EvolveOptions& opts) {
  if (!(rho0.dims() == l.dims())) {
    throw DimensionMismatch("evolve: state and generator act on different spaces");
  }
  if (!(t_final > 0.0) || !(dt_max > 0.0)) {
    throw InvalidParameter("evolve: t_final and dt_max must be > 0");
  }

  // Dormand-Prince 5(4) tableau.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  // L is dense in storage but sparse in structure; the integrator only needs
  // matrix-vector products.
  const Eigen::SparseMatrix<Complex> gen = l.matrix().sparseView();
  const int d = rho0.size();
  ComplexVector y = vectorize(rho0.matrix());
  ComplexVector k1 = gen * y, k2, k3, k4, k5, k6, k7, y_new, err;

  double t = 0.0;
  double h = std::min(dt_max, t_final);
  const double t_eps = 1e-13 * t_final;
  while (t_final - t > t_eps) {
    if (t + h > t_final) h = t_final - t;
    k2 = gen * (y + h * a21 * k1);
    k3 = gen * (y + h * (a31 * k1 + a32 * k2));
    k4 = gen * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = gen * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = gen * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = gen * y_new;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      const double scale =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(y(k)), std::abs(y_new(k)));
      err_norm = std::max(err_norm, std::abs(err(k)) / scale);
    }

    if (err_norm <= 1.0) {
      t += h;
      y.swap(y_new);
      k1.swap(k7);
      // Round-off in the matrix-vector products leaks into the anti-Hermitian
      // part, which L itself never feeds.
      hermitize_vec(y, d);
    }
    const double factor =
        err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    h = std::min(h * factor, dt_max);
    if (t_final - t > t_eps && h < opts.min_step) {
      throw StiffnessError("evolve: step size underflow at t = " + format_number(t));
    }
  }
  return DensityMatrix(rho0.dims(), unvectorize(y, d));
}

}  // namespace magblock
