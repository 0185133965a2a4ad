#pragma once

// Dense complex-matrix kernel shared by every other module.
//
// Conventions:
//   * hbar = 1, so evolution operators are exp(-i H t).
//   * Composite spaces are ordered system (x) probe; composite index
//     i_s * dim_p + i_p.
//   * Two-level bases are ordered {|1>, |0>}: sigma_z = diag(+1, -1),
//     sigma_+ = |1><0| = [[0, 1], [0, 0]].

#include "iqc/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <span>

namespace iqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double trace = 1e-12;
inline constexpr double state_hermitian = 1e-12;
inline constexpr double psd_floor = -1e-10;
} // namespace tol

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
Matrix plus();  // |1><0|
Matrix minus(); // |0><1|
} // namespace pauli

// Max-entry deviation from Hermiticity.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols())
    return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a,
                  double tolerance = tol::hermitian) {
  return hermiticity_defect(a) <= tolerance;
}

template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  if (u.rows() != u.cols())
    return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u,
                double tolerance = tol::unitary) {
  return unitarity_defect(u) <= tolerance;
}

/// Kronecker product a (x) b; the first factor owns the slow index.
template <typename A, typename B>
Matrix kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          Complex(a(i, j)) * b.template cast<Complex>();
  return out;
}

/// Contract the probe index of a (dim_s*dim_p)-square operator ordered
/// system (x) probe.
Matrix partial_trace_probe(const Matrix& a, Index dim_s, Index dim_p);

/// Hermitian, positive-semidefinite, unit-trace operator.
///
/// Construction validates the invariants and stores the Hermitian part, so
/// round-off asymmetry never leaks into later products.
class DensityMatrix {
public:
  explicit DensityMatrix(const Matrix& mat);

  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix diagonal(std::span<const double> weights);
  static DensityMatrix maximally_mixed(Index dim);

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  Complex operator()(Index i, Index j) const { return mat_(i, j); }

  RealVector spectrum() const;

private:
  Matrix mat_;
};

DensityMatrix partial_trace_probe(const DensityMatrix& rho, Index dim_s,
                                  Index dim_p);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Eigen-decomposition of a Hermitian matrix.
///
/// Values ascend. Each eigenvector is phase-fixed so that its largest-magnitude
/// component is real and positive (first index wins ties).
struct Eigensystem {
  RealVector values;
  Matrix vectors;

  Matrix reconstruct() const;
};

Eigensystem eig_hermitian(const Matrix& a);

/// exp(-i h t) for Hermitian h, via the eigendecomposition.
Matrix expm_i_hermitian(const Matrix& h, double t);

/// Trace distance 1/2 ||a - b||_1.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Matrix& a, const Matrix& b);

} // namespace iqc
