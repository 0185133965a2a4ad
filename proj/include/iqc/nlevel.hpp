#pragma once

// N-level system coupled to an N-level probe through a product interaction
// H_I = h_s (x) h_p.
//
// In the eigenbasis {|M>} of h_p the composite propagator is block diagonal,
//
//   exp(-i (h_s (x) h_p) t) = sum_M exp(-i E_M h_s t) (x) |M><M|,
//
// so the reduced dynamics is the mixed-unitary channel with Kraus operators
// K_M = sqrt(p_MM) U_M, p_MM = <M| rho_p |M>.

#include "iqc/opkit.hpp"

#include <vector>

namespace iqc {

class ProductHamiltonian {
public:
  /// Both factors must be Hermitian and of equal dimension.
  ProductHamiltonian(Matrix h_s, Matrix h_p);

  Index dim() const { return h_s_.rows(); }
  const Matrix& system_factor() const { return h_s_; }
  const Matrix& probe_factor() const { return h_p_; }
  const Eigensystem& probe_eigensystem() const { return probe_eig_; }

  /// h_s (x) h_p on the composite space.
  Matrix full() const { return kron(h_s_, h_p_); }

private:
  Matrix h_s_;
  Matrix h_p_;
  Eigensystem probe_eig_;
};

struct ConditionalBranch {
  double energy = 0.0; // E_M
  Matrix unitary;      // exp(-i E_M h_s t)
};

struct ConditionalDecomposition {
  std::vector<ConditionalBranch> branches;
  Matrix probe_basis; // columns |M>, matching branches
};

ConditionalDecomposition conditional_decomposition(const ProductHamiltonian& h,
                                                   double t);

/// sum_M U_M (x) |M><M|.
Matrix recombine(const ConditionalDecomposition& d);

/// Mixed-unitary channel rho -> sum_M p_M U_M rho U_M^dag.
class KrausChannel {
public:
  KrausChannel(RealVector weights, std::vector<Matrix> unitaries);

  Index dim() const { return unitaries_.front().rows(); }
  const RealVector& weights() const { return weights_; }
  const std::vector<Matrix>& unitaries() const { return unitaries_; }

  Matrix kraus_operator(std::size_t m) const;
  /// max-entry deviation of sum_M K_M^dag K_M from the identity.
  double completeness_defect() const;

private:
  RealVector weights_;
  std::vector<Matrix> unitaries_;
};

/// Weights p_MM = <M| probe_state |M> in the h_p eigenbasis; coherences
/// between different |M> do not enter the reduced dynamics.
KrausChannel kraus_from_probe(const ConditionalDecomposition& d,
                              const DensityMatrix& probe_state);

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);

/// Orthonormal basis whose first column is v; the remaining columns come
/// from Gram-Schmidt over the standard basis in index order, skipping
/// candidates whose residual norm falls below 1e-8.
Matrix complete_basis(const Vector& v);

/// Unitary U with U src = dst, built as complete_basis(dst) *
/// complete_basis(src)^dag. Throws NormalizationError for non-unit inputs.
Matrix pure_state_transporter(const Vector& src, const Vector& dst);

/// c[m](alpha, j) = <phi_alpha| exp(-i E_m h_s t) |j>: one N x N matrix per
/// probe energy, rows indexed by the reference state alpha.
using CoefficientTensor = std::vector<Matrix>;

/// Reference basis phi_alpha = columns of `reference` (must be unitary).
CoefficientTensor expansion_coefficients(const Matrix& h_s,
                                         std::span<const double> energies,
                                         double t, const Matrix& reference);

/// Reference basis phi_alpha(T) = exp(-i h_s T)|alpha>.
CoefficientTensor expansion_coefficients(const Matrix& h_s,
                                         std::span<const double> energies,
                                         double t, double reference_time);

struct ReachabilityProblem {
  RealVector initial_weights; // p_j
  RealVector target_weights;  // q_alpha
  CoefficientTensor coefficients;

  Index dim() const { return initial_weights.size(); }
  /// Throws DimensionError / ProbabilityError / NormalizationError.
  void validate() const;
};

struct ReachabilityResidual {
  RealVector diagonal;    // q_alpha - sum_j p_j sum_m w_m |c|^2
  Vector off_diagonal;    // ordered pairs beta != gamma, row-major
  double norm() const;
};

ReachabilityResidual reachability_residual(const ReachabilityProblem& prob,
                                           const RealVector& w);

struct ProbeSpectrumSolution {
  RealVector weights;
  double residual = 0.0;
  int iterations = 0;
  bool reachable = false;
};

/// Minimise ||residual(w)||^2 over the probability simplex by projected
/// gradient descent from the uniform vector. residual <= 1e-8 declares the
/// target reachable.
ProbeSpectrumSolution solve_probe_spectrum(const ReachabilityProblem& prob,
                                           int max_iterations = 10000);

/// sum_j p_j sum_m w_m |phi_j(E_m t)><phi_j(E_m t)| with
/// |phi_j(E_m t)> = exp(-i E_m h_s t)|j>: the reduced state for a system
/// initially diagonal in the standard basis and a probe whose h_p-eigenbasis
/// diagonal is w.
DensityMatrix general_reduced_state(const Matrix& h_s,
                                    std::span<const double> energies, double t,
                                    const RealVector& initial_weights,
                                    const RealVector& w);

/// Feasible instance built by evaluating the reduced state forward from the
/// probe diagonal w_star and taking its eigenbasis as the reference basis.
/// The residual at w_star vanishes up to round-off.
ReachabilityProblem forward_reachability_problem(const Matrix& h_s,
                                                 std::span<const double> energies,
                                                 double t,
                                                 const RealVector& initial_weights,
                                                 const RealVector& w_star);

/// Euclidean projection onto {w >= 0, sum w = 1}.
RealVector project_to_simplex(const RealVector& v);

} // namespace iqc
