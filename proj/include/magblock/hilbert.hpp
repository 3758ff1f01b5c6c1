#pragma once

// Operator algebra on the truncated qubit (x) magnon Hilbert space.
//
// Basis convention, used by every module in the project: qubit factor first,
// magnon factor second, flat index = q * (N_max + 1) + n with q = 0 for the
// ground state |g> and q = 1 for the excited state |e>.

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "magblock/errors.hpp"

namespace magblock {

template <typename Real>
using ComplexMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;

enum class QubitLevel : int { ground = 0, excited = 1 };
enum class Factor { qubit, magnon };

struct SpaceDims {
  static constexpr int qubit_dim = 2;

  SpaceDims() = default;
  explicit SpaceDims(int cutoff) : magnon_cutoff(cutoff) {
    if (cutoff < 1) {
      throw InvalidDimension("magnon cutoff must be >= 1, got " + std::to_string(cutoff));
    }
  }

  int magnon_dim() const { return magnon_cutoff + 1; }
  int total() const { return qubit_dim * magnon_dim(); }
  int factor_dim(Factor f) const { return f == Factor::qubit ? qubit_dim : magnon_dim(); }

  int index(QubitLevel q, int n) const { return static_cast<int>(q) * magnon_dim() + n; }

  friend bool operator==(const SpaceDims&, const SpaceDims&) = default;

  int magnon_cutoff = 1;
};

/// Bosonic lowering operator on Fock states |0>..|n_max>.
template <typename Real = double>
ComplexMatrixT<Real> annihilation(int n_max) {
  if (n_max < 1) {
    throw InvalidDimension("annihilation: n_max must be >= 1, got " + std::to_string(n_max));
  }
  ComplexMatrixT<Real> a = ComplexMatrixT<Real>::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<Real>(n));
  }
  return a;
}

template <typename Real = double>
struct QubitOps {
  ComplexMatrixT<Real> sigma_minus;
  ComplexMatrixT<Real> sigma_plus;
  ComplexMatrixT<Real> sigma_z;
};

/// Two-level operators in the {|g>, |e>} basis; sigma_z|e> = +|e>.
template <typename Real = double>
QubitOps<Real> qubit_ops() {
  const int g = static_cast<int>(QubitLevel::ground);
  const int e = static_cast<int>(QubitLevel::excited);
  QubitOps<Real> ops;
  ops.sigma_minus = ComplexMatrixT<Real>::Zero(2, 2);
  ops.sigma_minus(g, e) = Real(1);
  ops.sigma_plus = ops.sigma_minus.adjoint();
  ops.sigma_z = ComplexMatrixT<Real>::Zero(2, 2);
  ops.sigma_z(e, e) = Real(1);
  ops.sigma_z(g, g) = Real(-1);
  return ops;
}

/// Dense operator on the full space, tagged with its dimensions.
template <typename Real>
class BasicOperator {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrixT<Real>;

  BasicOperator(SpaceDims dims, Matrix entries) : dims_(dims), entries_(std::move(entries)) {
    if (entries_.rows() != dims_.total() || entries_.cols() != dims_.total()) {
      throw DimensionMismatch("operator matrix is " + std::to_string(entries_.rows()) + "x" +
                              std::to_string(entries_.cols()) + ", expected " +
                              std::to_string(dims_.total()) + "x" + std::to_string(dims_.total()));
    }
    if (!entries_.allFinite()) {
      throw InvalidParameter("operator has non-finite entries");
    }
  }

  static BasicOperator identity(SpaceDims dims) {
    return BasicOperator(dims, Matrix::Identity(dims.total(), dims.total()));
  }
  static BasicOperator zero(SpaceDims dims) {
    return BasicOperator(dims, Matrix::Zero(dims.total(), dims.total()));
  }

  const SpaceDims& dims() const { return dims_; }
  const Matrix& matrix() const { return entries_; }
  Scalar operator()(int row, int col) const { return entries_(row, col); }
  int size() const { return dims_.total(); }

  Real hermiticity_error() const { return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff(); }

 private:
  SpaceDims dims_;
  Matrix entries_;
};

using Operator = BasicOperator<double>;

namespace detail {
template <typename Real>
void require_same_dims(const BasicOperator<Real>& a, const BasicOperator<Real>& b, const char* what) {
  if (!(a.dims() == b.dims())) {
    throw DimensionMismatch(std::string(what) + ": operands act on different spaces");
  }
}
}  // namespace detail

/// Kronecker product of a factor operator with the identity on the other factor.
template <typename Derived>
BasicOperator<typename Derived::RealScalar> embed(const Eigen::MatrixBase<Derived>& factor_op,
                                                  Factor which, SpaceDims dims) {
  using Real = typename Derived::RealScalar;
  using Matrix = ComplexMatrixT<Real>;
  const int dim = dims.factor_dim(which);
  if (factor_op.rows() != dim || factor_op.cols() != dim) {
    throw DimensionMismatch("embed: factor operator is " + std::to_string(factor_op.rows()) + "x" +
                            std::to_string(factor_op.cols()) + ", expected " +
                            std::to_string(dim) + "x" + std::to_string(dim));
  }
  const Matrix op = factor_op.template cast<std::complex<Real>>();
  const Matrix qubit = which == Factor::qubit ? op : Matrix::Identity(2, 2);
  const Matrix magnon = which == Factor::magnon ? op : Matrix::Identity(dims.magnon_dim(), dims.magnon_dim());

  const int nm = dims.magnon_dim();
  Matrix full = Matrix::Zero(dims.total(), dims.total());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (qubit(i, j) != std::complex<Real>(0)) {
        full.block(i * nm, j * nm, nm, nm) = qubit(i, j) * magnon;
      }
    }
  }
  return BasicOperator<Real>(dims, std::move(full));
}

template <typename Real>
BasicOperator<Real> dagger(const BasicOperator<Real>& a) {
  return BasicOperator<Real>(a.dims(), a.matrix().adjoint());
}

template <typename Real>
BasicOperator<Real> operator*(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  detail::require_same_dims(a, b, "multiply");
  return BasicOperator<Real>(a.dims(), a.matrix() * b.matrix());
}

template <typename Real>
BasicOperator<Real> operator+(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  detail::require_same_dims(a, b, "add");
  return BasicOperator<Real>(a.dims(), a.matrix() + b.matrix());
}

template <typename Real>
BasicOperator<Real> operator-(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  detail::require_same_dims(a, b, "subtract");
  return BasicOperator<Real>(a.dims(), a.matrix() - b.matrix());
}

template <typename Real, typename S>
BasicOperator<Real> operator*(S scale, const BasicOperator<Real>& a) {
  return BasicOperator<Real>(a.dims(), std::complex<Real>(scale) * a.matrix());
}

template <typename Real>
BasicOperator<Real> commutator(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  return a * b - b * a;
}

/// Pure state on the full space.
class StateVector {
 public:
  StateVector(SpaceDims dims, ComplexVector entries);

  static StateVector basis(SpaceDims dims, QubitLevel q, int n);

  const SpaceDims& dims() const { return dims_; }
  const ComplexVector& vector() const { return entries_; }
  double norm() const { return entries_.norm(); }

 private:
  SpaceDims dims_;
  ComplexVector entries_;
};

/// Hermitian, unit-trace, positive semidefinite operator. Construction checks
/// all three properties.
class DensityMatrix {
 public:
  static constexpr double hermiticity_tol = 1e-10;
  static constexpr double trace_tol = 1e-10;
  static constexpr double positivity_floor = -1e-10;

  DensityMatrix(SpaceDims dims, ComplexMatrix entries);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(SpaceDims dims);

  const SpaceDims& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return entries_; }
  int size() const { return dims_.total(); }

  double purity() const;
  double min_eigenvalue() const;

 private:
  SpaceDims dims_;
  ComplexMatrix entries_;
};

/// Tr(rho A).
Complex expectation(const DensityMatrix& rho, const Operator& a);
Complex expectation(const StateVector& psi, const Operator& a);

/// 0.5 * ||a - b||_1 over the eigenvalues of the Hermitian difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace magblock
