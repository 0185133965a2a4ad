#include "iqc/opkit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iqc {

namespace pauli {

Matrix identity() { return Matrix::Identity(2, 2); }

Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix plus() {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  return m;
}

Matrix minus() { return plus().adjoint(); }

} // namespace pauli

namespace {

// Hermiticity tolerance grows with the operator scale so that, e.g., a
// Hamiltonian with entries ~10 still passes after round-off.
double scaled(double tolerance, const Matrix& a) {
  return tolerance * std::max(1.0, a.cwiseAbs().maxCoeff());
}

void require_hermitian(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a square matrix, got " << a.rows() << "x"
        << a.cols();
    throw DimensionError(msg.str());
  }
  if (!a.allFinite())
    throw HermiticityError(std::string(what) + ": non-finite entries");
  const double defect = hermiticity_defect(a);
  if (defect > scaled(tol::hermitian, a)) {
    std::ostringstream msg;
    msg << what << ": matrix is not Hermitian (max |A - A^dag| = " << defect
        << ")";
    throw HermiticityError(msg.str());
  }
}

} // namespace

Matrix partial_trace_probe(const Matrix& a, Index dim_s, Index dim_p) {
  if (dim_s <= 0 || dim_p <= 0 || a.rows() != dim_s * dim_p ||
      a.cols() != dim_s * dim_p) {
    std::ostringstream msg;
    msg << "partial_trace_probe: operator is " << a.rows() << "x" << a.cols()
        << " but dim_s * dim_p = " << dim_s << " * " << dim_p;
    throw DimensionError(msg.str());
  }
  Matrix out = Matrix::Zero(dim_s, dim_s);
  for (Index i = 0; i < dim_s; ++i)
    for (Index j = 0; j < dim_s; ++j)
      out(i, j) = a.block(i * dim_p, j * dim_p, dim_p, dim_p).trace();
  return out;
}

DensityMatrix::DensityMatrix(const Matrix& mat) {
  if (mat.rows() == 0 || mat.rows() != mat.cols())
    throw DimensionError("DensityMatrix: expected a non-empty square matrix");
  if (!mat.allFinite())
    throw StateError("DensityMatrix: non-finite entries");
  if (hermiticity_defect(mat) > tol::state_hermitian)
    throw StateError("DensityMatrix: matrix is not Hermitian");
  const Complex tr = mat.trace();
  if (std::abs(tr - 1.0) > tol::trace) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "DensityMatrix: trace is " << tr.real() << " (expected 1)";
    throw StateError(msg.str());
  }
  mat_ = 0.5 * (mat + mat.adjoint());
  const double lowest =
      Eigen::SelfAdjointEigenSolver<Matrix>(mat_, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  if (lowest < tol::psd_floor) {
    std::ostringstream msg;
    msg << "DensityMatrix: negative eigenvalue " << lowest;
    throw StateError(msg.str());
  }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-10)
    throw NormalizationError("DensityMatrix::pure: state is not normalized");
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> weights) {
  Matrix m = Matrix::Zero(static_cast<Index>(weights.size()),
                          static_cast<Index>(weights.size()));
  for (std::size_t k = 0; k < weights.size(); ++k)
    m(static_cast<Index>(k), static_cast<Index>(k)) = weights[k];
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

RealVector DensityMatrix::spectrum() const {
  return Eigen::SelfAdjointEigenSolver<Matrix>(mat_, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

DensityMatrix partial_trace_probe(const DensityMatrix& rho, Index dim_s,
                                  Index dim_p) {
  return DensityMatrix(partial_trace_probe(rho.matrix(), dim_s, dim_p));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

Matrix Eigensystem::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

Eigensystem eig_hermitian(const Matrix& a) {
  require_hermitian(a, "eig_hermitian");
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw HermiticityError("eig_hermitian: decomposition did not converge");

  Eigensystem es{solver.eigenvalues(), solver.eigenvectors()};
  for (Index k = 0; k < es.vectors.cols(); ++k) {
    auto v = es.vectors.col(k);
    Index lead = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
      // Ties are broken towards the lower index; the margin absorbs round-off
      // so degenerate magnitudes do not flip the choice between runs.
      if (std::abs(v(i)) > best + 1e-12) {
        best = std::abs(v(i));
        lead = i;
      }
    }
    v *= std::conj(v(lead)) / std::abs(v(lead));
    v(lead) = std::abs(v(lead));
  }
  return es;
}

Matrix expm_i_hermitian(const Matrix& h, double t) {
  const Eigensystem es = eig_hermitian(h);
  Vector phases(es.values.size());
  for (Index k = 0; k < phases.size(); ++k)
    phases(k) = std::polar(1.0, -es.values(k) * t);
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("trace_distance: dimension mismatch");
  const Matrix diff = a - b;
  const RealVector ev =
      Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (diff + diff.adjoint()),
                                            Eigen::EigenvaluesOnly)
          .eigenvalues();
  return 0.5 * ev.cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

} // namespace iqc
