#include "magblock/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace magblock {

StateVector::StateVector(SpaceDims dims, ComplexVector entries)
    : dims_(dims), entries_(std::move(entries)) {
  if (entries_.size() != dims_.total()) {
    throw DimensionMismatch("state vector has length " + std::to_string(entries_.size()) +
                            ", expected " + std::to_string(dims_.total()));
  }
  if (!entries_.allFinite()) {
    throw InvalidParameter("state vector has non-finite entries");
  }
}

StateVector StateVector::basis(SpaceDims dims, QubitLevel q, int n) {
  if (n < 0 || n > dims.magnon_cutoff) {
    throw InvalidDimension("Fock index " + std::to_string(n) + " outside [0, " +
                           std::to_string(dims.magnon_cutoff) + "]");
  }
  ComplexVector v = ComplexVector::Zero(dims.total());
  v(dims.index(q, n)) = 1.0;
  return StateVector(dims, std::move(v));
}

DensityMatrix::DensityMatrix(SpaceDims dims, ComplexMatrix entries)
    : dims_(dims), entries_(std::move(entries)) {
  const int d = dims_.total();
  if (entries_.rows() != d || entries_.cols() != d) {
    throw DimensionMismatch("density matrix is " + std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()) + ", expected " + std::to_string(d) +
                            "x" + std::to_string(d));
  }
  if (!entries_.allFinite()) {
    throw InvalidParameter("density matrix has non-finite entries");
  }
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermiticity_tol) {
    throw InvalidParameter("density matrix is not Hermitian (max deviation " +
                           format_number(herm) + ")");
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - Complex(1.0)) > trace_tol) {
    throw InvalidParameter("density matrix trace deviates from 1 by " +
                           format_number(std::abs(tr - Complex(1.0))));
  }
  const double lmin = min_eigenvalue();
  if (lmin < positivity_floor) {
    throw PositivityError("density matrix has eigenvalue " + format_number(lmin));
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const ComplexVector v = psi.vector() / psi.norm();
  return DensityMatrix(psi.dims(), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(SpaceDims dims) {
  const int d = dims.total();
  return DensityMatrix(dims, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Complex expectation(const DensityMatrix& rho, const Operator& a) {
  if (!(rho.dims() == a.dims())) {
    throw DimensionMismatch("expectation: density matrix and operator act on different spaces");
  }
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (rho.matrix().transpose().cwiseProduct(a.matrix())).sum();
}

Complex expectation(const StateVector& psi, const Operator& a) {
  if (!(psi.dims() == a.dims())) {
    throw DimensionMismatch("expectation: state and operator act on different spaces");
  }
  const ComplexVector& v = psi.vector();
  return v.dot(a.matrix() * v) / v.squaredNorm();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (!(a.dims() == b.dims())) {
    throw DimensionMismatch("trace_distance: density matrices act on different spaces");
  }
  const ComplexMatrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (diff + diff.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace magblock
