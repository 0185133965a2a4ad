#pragma once

// Two-level system driven through a two-level probe by
//
//   H_I(g) = (g1 sz + g2 s+ + g2* s-) (x) (g3 sx + g4 sz).
//
// Because H_I is a product, the composite propagator splits into two
// conditional system unitaries U+ and U-, one per eigenvector |+>, |-> of the
// probe factor. The reduced state is then a two-branch mixture whose weights
// are the probe populations in the |+-> basis.
//
// Closed-form entries (ClosedFormState) are expressed in the orthonormal
// basis {psi+0, psi+0_perp} = {U+|0>, U+|1>}. Labels are transposed relative
// to row/column indices, so rho10 is the upper-right element:
//
//   rho10 = <psi+0| rho |psi+0_perp>,   rho01 = conj(rho10).
//
// With that labelling the coherence carries exp(-i beta) and the spectral
// phase gamma = Arg(rho01) rotates psi+0 towards psi+0_perp; both are checked
// against the brute-force partial trace in the tests.

#include "iqc/opkit.hpp"

#include <array>
#include <cstdint>

namespace iqc {

struct QubitCouplings {
  double g1 = 0.0;
  Complex g2 = 0.0;
  double g3 = 0.0;
  double g4 = 0.0;

  /// sqrt(g3^2 + g4^2): magnitude of the probe factor's eigenvalues.
  double probe_strength() const;
};

/// Local system rotation f_s(theta, phi) of the transformation F = f_s (x) I.
struct LocalRotation {
  double theta = 0.0;
  double phi = 0.0;

  Matrix matrix() const;
};

/// Probe state diag(1 - p, p) in the {|1>, |0>} ordering, i.e. weight p on
/// the ground state |0>. Used both for the system's canonical initial state
/// and for the probe preparation.
struct DiagonalQubitState {
  double p = 0.0;

  DensityMatrix density() const;
};

struct ConditionalUnitaries {
  Matrix plus;
  Matrix minus;
};

struct OverlapAngles {
  double alpha = 0.0; // in [0, pi/2]
  double beta = 0.0;  // in (-pi, pi]
};

/// Probe populations and coherence in the |+->_p basis.
struct PMProbeComponents {
  double pp_plus = 0.0;
  double pp_minus = 0.0;
  Complex pm_cross = 0.0; // <+| rho_p |->
};

struct ClosedFormState {
  double rho00 = 0.0;
  double rho11 = 0.0;
  Complex rho10 = 0.0;

  Complex rho01() const { return std::conj(rho10); }
};

struct SpectralForm {
  double e_plus = 0.0;
  double e_minus = 0.0;
  double gamma = 0.0;
  double mixing = 0.0; // Gamma
  // Coordinates in the {psi+0, psi+0_perp} basis.
  Eigen::Vector2cd psi_plus;
  Eigen::Vector2cd psi_minus;
};

struct SolverBudget {
  double tol = 1e-8;
  std::int64_t max_evaluations = 100000;
  int lattice = 64;
};

struct ControlSolution {
  QubitCouplings couplings;
  double theta = 0.0;
  double alpha = 0.0;
  double p_p = 0.0;
  double t = 0.0;
  double residual = 0.0;
  bool feasible = true;
  std::int64_t evaluations = 0;
};

/// 2x2 system factor g1 sz + g2 s+ + g2* s-.
Matrix system_factor(const QubitCouplings& g);
/// 2x2 probe factor g3 sx + g4 sz.
Matrix probe_factor(const QubitCouplings& g);

/// 4x4 interaction Hamiltonian, ordered system (x) probe.
Matrix build_interaction(const QubitCouplings& g);

/// Couplings g' with H_I(g') = F H_I(g) F^dag; the probe couplings are left
/// untouched.
QubitCouplings transform_couplings(const LocalRotation& r,
                                   const QubitCouplings& g);

/// theta = atan2(g3, g4), so that
///   |+>_p = cos(theta/2)|1> + sin(theta/2)|0>,
///   |->_p = sin(theta/2)|1> - cos(theta/2)|0>
/// are eigenvectors of g3 sx + g4 sz with eigenvalues +-probe_strength().
/// Throws DegenerateProbeError when g3 = g4 = 0.
double probe_mixing_angle(const QubitCouplings& g);

/// |+>_p and |->_p as columns of a 2x2 matrix.
Matrix probe_pm_basis(double theta);

/// U+- = exp(-i H+-^s t) with H+-^s = +-probe_strength() * system_factor(g).
ConditionalUnitaries conditional_unitaries(const QubitCouplings& g, double t);

OverlapAngles overlap_angles(const ConditionalUnitaries& u);
OverlapAngles overlap_angles(const QubitCouplings& g, double t);

/// Components of the diagonal probe diag(1 - p_p, p_p) in the |+-> basis.
PMProbeComponents pm_components(double theta, double p_p);
/// Same for an arbitrary (possibly coherent) probe state.
PMProbeComponents pm_components(double theta, const DensityMatrix& probe);

/// Reduced state at time t for the canonical initial state
/// p_s|0><0| + (1 - p_s)|1><1|, in the {psi+0, psi+0_perp} basis.
ClosedFormState reduced_state_closed_form(double p_s, double theta, double p_p,
                                          const OverlapAngles& ang);
ClosedFormState reduced_state_closed_form(double p_s,
                                          const PMProbeComponents& probe,
                                          const OverlapAngles& ang);

/// Map closed-form entries back to the computational {|1>, |0>} basis.
DensityMatrix to_computational(const ClosedFormState& s,
                               const ConditionalUnitaries& u);

/// Two-branch mixture rho++ U+ rho U+^dag + rho-- U- rho U-^dag for an
/// arbitrary system state and probe state.
DensityMatrix reduced_state_conditional(const QubitCouplings& g, double t,
                                        const DensityMatrix& rho_s0,
                                        const DensityMatrix& rho_p0);

/// Closed-form reduced state in the computational basis for the canonical
/// system state and the diagonal probe diag(1 - p_p, p_p).
DensityMatrix closed_form_reduced_state(const QubitCouplings& g, double t,
                                        double p_s, double p_p);

/// Eigen-structure of [[rho00, rho10], [rho01, rho11]].
/// Throws StateError when rho00 + rho11 differs from 1 by more than 1e-10.
SpectralForm spectral_form(double rho00, double rho11, Complex rho01);

/// Probe occupancy p_p that places weight q on psi+0, solved literally from
/// the closed-form rho00. Throws DegenerateConditionError when the
/// denominator cos(theta) sin^2(alpha) (1 - 2 p_s) vanishes (|.| <= 1e-12),
/// InfeasibleError when the solution leaves [0, 1].
double analytic_conditions(double p_s, double q, double theta, double alpha);

/// Denominator of analytic_conditions, exposed for callers screening inputs.
double analytic_denominator(double p_s, double theta, double alpha);

/// Zero-coherence pair cos(theta) = 1/(1 - 2 p_p), alpha = n pi, to 1e-10.
bool satisfies_zero_coherence(double theta, double p_p, double alpha);

/// Find couplings, time and probe occupancy steering the canonical initial
/// state with weight p_s on |0> to target.
///
/// A geometric construction on the Bloch ball is tried first; it is exact for
/// every target whose Bloch radius does not exceed |1 - 2 p_s|. Whatever it
/// leaves above budget.tol is passed through search_controls_lattice. If the
/// best residual still exceeds budget.tol the solution is returned with
/// feasible = false.
ControlSolution solve_controls_numeric(double p_s, const DensityMatrix& target,
                                       const SolverBudget& budget = {});

/// Derivative-free search over (theta, t, p_p) for a fixed system factor
/// direction (g1, g2): a uniform lattice followed by coordinate descent with
/// step halving. Lowest lattice index wins ties.
ControlSolution search_controls_lattice(double p_s, const DensityMatrix& target,
                                        double g1, Complex g2,
                                        const SolverBudget& budget = {});

/// Bloch vector (<sx>, <sy>, <sz>) of a 2x2 state.
Eigen::Vector3d bloch_vector(const Matrix& rho);

} // namespace iqc
