#include "iqc/nlevel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace iqc {

ProductHamiltonian::ProductHamiltonian(Matrix h_s, Matrix h_p)
    : h_s_(std::move(h_s)), h_p_(std::move(h_p)) {
  if (h_s_.rows() != h_s_.cols() || h_p_.rows() != h_p_.cols())
    throw DimensionError("ProductHamiltonian: factors must be square");
  if (h_s_.rows() != h_p_.rows()) {
    std::ostringstream msg;
    msg << "ProductHamiltonian: system dimension " << h_s_.rows()
        << " differs from probe dimension " << h_p_.rows();
    throw DimensionError(msg.str());
  }
  if (!is_hermitian(h_s_))
    throw HermiticityError("ProductHamiltonian: h_s is not Hermitian");
  probe_eig_ = eig_hermitian(h_p_);
}

ConditionalDecomposition conditional_decomposition(const ProductHamiltonian& h,
                                                   double t) {
  const Eigensystem& es = h.probe_eigensystem();
  const Eigensystem sys = eig_hermitian(h.system_factor());

  ConditionalDecomposition d;
  d.probe_basis = es.vectors;
  d.branches.reserve(static_cast<std::size_t>(es.values.size()));
  for (Index m = 0; m < es.values.size(); ++m) {
    // exp(-i E_M h_s t) shares the eigenvectors of h_s.
    Vector phases(sys.values.size());
    for (Index k = 0; k < phases.size(); ++k)
      phases(k) = std::polar(1.0, -es.values(m) * sys.values(k) * t);
    d.branches.push_back(
        {es.values(m), sys.vectors * phases.asDiagonal() * sys.vectors.adjoint()});
  }
  return d;
}

Matrix recombine(const ConditionalDecomposition& d) {
  const Index n_s = d.branches.front().unitary.rows();
  const Index n_p = d.probe_basis.rows();
  Matrix out = Matrix::Zero(n_s * n_p, n_s * n_p);
  for (std::size_t m = 0; m < d.branches.size(); ++m) {
    const Vector ket = d.probe_basis.col(static_cast<Index>(m));
    out += kron(d.branches[m].unitary, ket * ket.adjoint());
  }
  return out;
}

KrausChannel::KrausChannel(RealVector weights, std::vector<Matrix> unitaries)
    : weights_(std::move(weights)), unitaries_(std::move(unitaries)) {
  if (unitaries_.empty() ||
      static_cast<std::size_t>(weights_.size()) != unitaries_.size())
    throw DimensionError("KrausChannel: need one weight per unitary");
  if ((weights_.array() < 0.0).any() ||
      std::abs(weights_.sum() - 1.0) > tol::trace)
    throw ProbabilityError("KrausChannel: weights must form a distribution");
  const Index n = unitaries_.front().rows();
  for (const Matrix& u : unitaries_) {
    if (u.rows() != n || u.cols() != n)
      throw DimensionError("KrausChannel: unitaries differ in dimension");
    if (!is_unitary(u))
      throw StateError("KrausChannel: branch operator is not unitary");
  }
}

Matrix KrausChannel::kraus_operator(std::size_t m) const {
  return std::sqrt(weights_(static_cast<Index>(m))) * unitaries_.at(m);
}

double KrausChannel::completeness_defect() const {
  Matrix sum = Matrix::Zero(dim(), dim());
  for (std::size_t m = 0; m < unitaries_.size(); ++m) {
    const Matrix k = kraus_operator(m);
    sum += k.adjoint() * k;
  }
  return (sum - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

KrausChannel kraus_from_probe(const ConditionalDecomposition& d,
                              const DensityMatrix& probe_state) {
  if (probe_state.dim() != d.probe_basis.rows())
    throw DimensionError("kraus_from_probe: probe dimension mismatch");
  RealVector w(static_cast<Index>(d.branches.size()));
  std::vector<Matrix> us;
  us.reserve(d.branches.size());
  for (std::size_t m = 0; m < d.branches.size(); ++m) {
    const Vector ket = d.probe_basis.col(static_cast<Index>(m));
    // Clip round-off below zero; a valid state has no negative diagonal.
    w(static_cast<Index>(m)) =
        std::max(0.0, ket.dot(probe_state.matrix() * ket).real());
    us.push_back(d.branches[m].unitary);
  }
  w /= w.sum();
  return KrausChannel(std::move(w), std::move(us));
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.dim())
    throw DimensionError("apply_channel: state dimension mismatch");
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (std::size_t m = 0; m < ch.unitaries().size(); ++m) {
    const Matrix& u = ch.unitaries()[m];
    out += ch.weights()(static_cast<Index>(m)) * u * rho.matrix() * u.adjoint();
  }
  return DensityMatrix(out);
}

Matrix complete_basis(const Vector& v) {
  const Index n = v.size();
  Matrix basis(n, n);
  basis.col(0) = v;
  Index filled = 1;
  for (Index k = 0; k < n && filled < n; ++k) {
    Vector cand = Vector::Unit(n, k);
    for (Index c = 0; c < filled; ++c)
      cand -= basis.col(c).dot(cand) * basis.col(c);
    const double norm = cand.norm();
    if (norm < 1e-8)
      continue;
    basis.col(filled++) = cand / norm;
  }
  return basis;
}

Matrix pure_state_transporter(const Vector& src, const Vector& dst) {
  if (src.size() != dst.size() || src.size() == 0)
    throw DimensionError("pure_state_transporter: vector sizes differ");
  if (std::abs(src.norm() - 1.0) > 1e-10 || std::abs(dst.norm() - 1.0) > 1e-10)
    throw NormalizationError("pure_state_transporter: inputs must be unit");
  return complete_basis(dst) * complete_basis(src).adjoint();
}

CoefficientTensor expansion_coefficients(const Matrix& h_s,
                                         std::span<const double> energies,
                                         double t, const Matrix& reference) {
  if (reference.rows() != h_s.rows() || reference.cols() != h_s.cols())
    throw DimensionError("expansion_coefficients: reference basis size");
  if (!is_unitary(reference))
    throw NormalizationError(
        "expansion_coefficients: reference basis is not orthonormal");
  CoefficientTensor c;
  c.reserve(energies.size());
  for (double e : energies)
    c.push_back(reference.adjoint() * expm_i_hermitian(h_s, e * t));
  return c;
}

CoefficientTensor expansion_coefficients(const Matrix& h_s,
                                         std::span<const double> energies,
                                         double t, double reference_time) {
  return expansion_coefficients(h_s, energies, t,
                                expm_i_hermitian(h_s, reference_time));
}

void ReachabilityProblem::validate() const {
  const Index n = dim();
  if (n == 0 || target_weights.size() != n ||
      static_cast<Index>(coefficients.size()) != n)
    throw DimensionError(
        "ReachabilityProblem: weights and coefficient tensor disagree on N");
  for (const RealVector* v : {&initial_weights, &target_weights})
    if ((v->array() < 0.0).any() || std::abs(v->sum() - 1.0) > 1e-10)
      throw ProbabilityError("ReachabilityProblem: weights must sum to 1");
  for (const Matrix& c : coefficients) {
    if (c.rows() != n || c.cols() != n)
      throw DimensionError("ReachabilityProblem: coefficient block size");
    const RealVector norms = c.colwise().squaredNorm().transpose();
    if ((norms.array() - 1.0).abs().maxCoeff() > 1e-10)
      throw NormalizationError(
          "ReachabilityProblem: coefficient columns are not unit vectors");
  }
}

namespace {

// The residual is affine in w: r(w) = y - M w with M real, stacking the
// diagonal rows followed by (Re, Im) rows for every ordered pair beta != gamma.
struct LinearModel {
  Eigen::MatrixXd m;
  RealVector y;
};

LinearModel linear_model(const ReachabilityProblem& prob) {
  const Index n = prob.dim();
  const Index n_pairs = n * (n - 1);
  LinearModel lm{Eigen::MatrixXd::Zero(n + 2 * n_pairs, n),
                 RealVector::Zero(n + 2 * n_pairs)};
  lm.y.head(n) = prob.target_weights;
  for (Index m = 0; m < n; ++m) {
    const Matrix& c = prob.coefficients[static_cast<std::size_t>(m)];
    // mixed(beta, gamma) = sum_j p_j c(beta, j) c(gamma, j)^*
    const Matrix mixed =
        c * prob.initial_weights.cast<Complex>().asDiagonal() * c.adjoint();
    for (Index a = 0; a < n; ++a)
      lm.m(a, m) = mixed(a, a).real();
    Index row = n;
    for (Index b = 0; b < n; ++b)
      for (Index g = 0; g < n; ++g) {
        if (b == g)
          continue;
        // Off-diagonal rows target zero: r = 0 - M w, so negate.
        lm.m(row, m) = -mixed(b, g).real();
        lm.m(row + 1, m) = -mixed(b, g).imag();
        row += 2;
      }
  }
  return lm;
}

double objective(const LinearModel& lm, const RealVector& w) {
  return (lm.y - lm.m * w).squaredNorm();
}

void require_simplex(const RealVector& w, Index n) {
  if (w.size() != n)
    throw DimensionError("reachability: probe diagonal has wrong length");
  if (!w.allFinite() || (w.array() < 0.0).any() ||
      std::abs(w.sum() - 1.0) > 1e-10)
    throw ProbabilityError(
        "reachability: probe diagonal must be a probability vector");
}

} // namespace

double ReachabilityResidual::norm() const {
  return std::sqrt(diagonal.squaredNorm() + off_diagonal.squaredNorm());
}

ReachabilityResidual reachability_residual(const ReachabilityProblem& prob,
                                           const RealVector& w) {
  prob.validate();
  const Index n = prob.dim();
  require_simplex(w, n);

  Matrix mixed = Matrix::Zero(n, n);
  for (Index m = 0; m < n; ++m) {
    const Matrix& c = prob.coefficients[static_cast<std::size_t>(m)];
    mixed += w(m) * c * prob.initial_weights.cast<Complex>().asDiagonal() *
             c.adjoint();
  }

  ReachabilityResidual r;
  r.diagonal = prob.target_weights - mixed.diagonal().real();
  r.off_diagonal.resize(n * (n - 1));
  Index k = 0;
  for (Index b = 0; b < n; ++b)
    for (Index g = 0; g < n; ++g)
      if (b != g)
        r.off_diagonal(k++) = mixed(b, g);
  return r;
}

RealVector project_to_simplex(const RealVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0)
      shift = candidate;
  }
  return (v.array() - shift).max(0.0).matrix();
}

ProbeSpectrumSolution solve_probe_spectrum(const ReachabilityProblem& prob,
                                           int max_iterations) {
  prob.validate();
  const Index n = prob.dim();
  const LinearModel lm = linear_model(prob);

  const Eigen::MatrixXd gram = lm.m.transpose() * lm.m;
  const double lipschitz =
      2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                gram, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .maxCoeff();

  ProbeSpectrumSolution sol;
  RealVector w = RealVector::Constant(n, 1.0 / static_cast<double>(n));
  double f = objective(lm, w);
  if (lipschitz > 0.0) {
    const double step = 1.0 / lipschitz;
    for (; sol.iterations < max_iterations && f > 1e-24; ++sol.iterations) {
      const RealVector grad = -2.0 * lm.m.transpose() * (lm.y - lm.m * w);
      const RealVector next = project_to_simplex(w - step * grad);
      const double moved = (next - w).norm();
      w = next;
      f = objective(lm, w);
      if (moved < 1e-16)
        break;
    }
  }

  // Gradient projection converges sublinearly on rank-deficient systems, so
  // finish with minimum-norm Gauss-Newton steps restricted to the support.
  for (int pass = 0; pass < 4 && f > 1e-24; ++pass) {
    std::vector<Index> support;
    for (Index k = 0; k < n; ++k)
      if (w(k) > 1e-12)
        support.push_back(k);
    const Index s = static_cast<Index>(support.size());
    Eigen::MatrixXd a(lm.m.rows() + 1, s);
    for (Index k = 0; k < s; ++k) {
      a.col(k).head(lm.m.rows()) = lm.m.col(support[static_cast<std::size_t>(k)]);
      a(lm.m.rows(), k) = 1.0;
    }
    RealVector rhs(lm.m.rows() + 1);
    rhs.head(lm.m.rows()) = lm.y - lm.m * w;
    rhs(lm.m.rows()) = 0.0;
    const RealVector delta =
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).solve(rhs);
    RealVector trial = w;
    for (Index k = 0; k < s; ++k)
      trial(support[static_cast<std::size_t>(k)]) += delta(k);
    if ((trial.array() < 0.0).any())
      break;
    trial /= trial.sum();
    const double ft = objective(lm, trial);
    if (!(ft < f))
      break;
    w = trial;
    f = ft;
  }

  sol.weights = w;
  sol.residual = std::sqrt(f);
  sol.reachable = sol.residual <= 1e-8;
  return sol;
}

DensityMatrix general_reduced_state(const Matrix& h_s,
                                    std::span<const double> energies, double t,
                                    const RealVector& initial_weights,
                                    const RealVector& w) {
  const Index n = h_s.rows();
  if (initial_weights.size() != n || w.size() != n ||
      static_cast<Index>(energies.size()) != n)
    throw DimensionError("general_reduced_state: dimension mismatch");
  Matrix rho = Matrix::Zero(n, n);
  for (Index m = 0; m < n; ++m) {
    const Matrix u = expm_i_hermitian(h_s, energies[static_cast<std::size_t>(m)] * t);
    for (Index j = 0; j < n; ++j) {
      const Vector phi = u.col(j);
      rho += initial_weights(j) * w(m) * phi * phi.adjoint();
    }
  }
  return DensityMatrix(rho);
}

ReachabilityProblem forward_reachability_problem(const Matrix& h_s,
                                                 std::span<const double> energies,
                                                 double t,
                                                 const RealVector& initial_weights,
                                                 const RealVector& w_star) {
  const DensityMatrix rho =
      general_reduced_state(h_s, energies, t, initial_weights, w_star);
  const Eigensystem es = eig_hermitian(rho.matrix());
  ReachabilityProblem prob;
  prob.initial_weights = initial_weights;
  prob.target_weights = es.values.cwiseMax(0.0);
  prob.target_weights /= prob.target_weights.sum();
  prob.coefficients = expansion_coefficients(h_s, energies, t, es.vectors);
  return prob;
}

} // namespace iqc
