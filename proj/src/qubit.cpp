#include "iqc/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace iqc {

namespace {

constexpr double kPi = std::numbers::pi;

// Overlaps below this magnitude are treated as exactly zero when extracting
// the relative phase beta.
constexpr double kOverlapFloor = 1e-12;

double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi)
    y += 2.0 * kPi;
  return y;
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must lie in [0, 1], got " << p;
    throw DomainError(msg.str());
  }
}

} // namespace

double QubitCouplings::probe_strength() const { return std::hypot(g3, g4); }

Matrix LocalRotation::matrix() const {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  Matrix f(2, 2);
  f << c, -std::polar(s, phi), std::polar(s, -phi), c;
  return f;
}

DensityMatrix DiagonalQubitState::density() const {
  require_probability(p, "DiagonalQubitState: p");
  const double w[] = {1.0 - p, p};
  return DensityMatrix::diagonal(w);
}

Matrix system_factor(const QubitCouplings& g) {
  return g.g1 * pauli::z() + g.g2 * pauli::plus() +
         std::conj(g.g2) * pauli::minus();
}

Matrix probe_factor(const QubitCouplings& g) {
  return g.g3 * pauli::x() + g.g4 * pauli::z();
}

Matrix build_interaction(const QubitCouplings& g) {
  return kron(system_factor(g), probe_factor(g));
}

QubitCouplings transform_couplings(const LocalRotation& r,
                                   const QubitCouplings& g) {
  const Matrix f = r.matrix();
  const Matrix h = f * system_factor(g) * f.adjoint();
  // f is in SU(2), so the rotated factor stays traceless:
  // h = [[g1', g2'], [g2'*, -g1']].
  QubitCouplings out = g;
  out.g1 = 0.5 * (h(0, 0).real() - h(1, 1).real());
  out.g2 = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  return out;
}

double probe_mixing_angle(const QubitCouplings& g) {
  if (g.probe_strength() == 0.0)
    throw DegenerateProbeError(
        "probe_mixing_angle: probe couplings g3 and g4 are both zero");
  return std::atan2(g.g3, g.g4);
}

Matrix probe_pm_basis(double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  Matrix b(2, 2);
  b << c, s, s, -c;
  return b;
}

ConditionalUnitaries conditional_unitaries(const QubitCouplings& g, double t) {
  const Matrix h = g.probe_strength() * system_factor(g);
  return {expm_i_hermitian(h, t), expm_i_hermitian(-h, t)};
}

OverlapAngles overlap_angles(const ConditionalUnitaries& u) {
  // |0> is the second basis vector in the {|1>, |0>} ordering.
  const Vector psi_p0 = u.plus.col(1);
  const Vector psi_perp = u.plus.col(0);
  const Vector psi_m0 = u.minus.col(1);

  const Complex along = psi_p0.dot(psi_m0);
  const Complex across = psi_perp.dot(psi_m0);

  OverlapAngles ang;
  ang.alpha = std::atan2(std::abs(across), std::abs(along));
  if (std::abs(along) > kOverlapFloor && std::abs(across) > kOverlapFloor)
    ang.beta = wrap_phase(std::arg(across) - std::arg(along));
  return ang;
}

OverlapAngles overlap_angles(const QubitCouplings& g, double t) {
  return overlap_angles(conditional_unitaries(g, t));
}

PMProbeComponents pm_components(double theta, double p_p) {
  require_probability(p_p, "pm_components: p_p");
  PMProbeComponents c;
  c.pp_plus = std::pow(std::cos(theta / 2), 2) - p_p * std::cos(theta);
  c.pp_minus = 1.0 - c.pp_plus;
  c.pm_cross = 0.5 * std::sin(theta) - p_p * std::sin(theta);
  return c;
}

PMProbeComponents pm_components(double theta, const DensityMatrix& probe) {
  if (probe.dim() != 2)
    throw DimensionError("pm_components: probe must be two-level");
  const Matrix b = probe_pm_basis(theta);
  const Matrix in_pm = b.adjoint() * probe.matrix() * b;
  PMProbeComponents c;
  c.pp_plus = in_pm(0, 0).real();
  c.pp_minus = in_pm(1, 1).real();
  c.pm_cross = in_pm(0, 1);
  return c;
}

ClosedFormState reduced_state_closed_form(double p_s,
                                          const PMProbeComponents& probe,
                                          const OverlapAngles& ang) {
  require_probability(p_s, "reduced_state_closed_form: p_s");
  const double s2 = std::pow(std::sin(ang.alpha), 2);
  const double c2 = std::pow(std::cos(ang.alpha), 2);
  const double pp = probe.pp_plus;
  const double pm = probe.pp_minus;

  ClosedFormState out;
  out.rho00 = p_s * pp + (1.0 - p_s) * pm * s2 + p_s * pm * c2;
  out.rho11 = (1.0 - p_s) * pp + p_s * pm * s2 + (1.0 - p_s) * pm * c2;
  out.rho10 = 0.5 * pm * std::sin(2.0 * ang.alpha) *
              std::polar(1.0, -ang.beta) * (2.0 * p_s - 1.0);
  return out;
}

ClosedFormState reduced_state_closed_form(double p_s, double theta, double p_p,
                                          const OverlapAngles& ang) {
  return reduced_state_closed_form(p_s, pm_components(theta, p_p), ang);
}

DensityMatrix to_computational(const ClosedFormState& s,
                               const ConditionalUnitaries& u) {
  const Vector b0 = u.plus.col(1);
  const Vector b1 = u.plus.col(0);
  const Matrix m = s.rho00 * b0 * b0.adjoint() + s.rho11 * b1 * b1.adjoint() +
                   s.rho10 * b0 * b1.adjoint() + s.rho01() * b1 * b0.adjoint();
  return DensityMatrix(m);
}

DensityMatrix reduced_state_conditional(const QubitCouplings& g, double t,
                                        const DensityMatrix& rho_s0,
                                        const DensityMatrix& rho_p0) {
  if (rho_s0.dim() != 2 || rho_p0.dim() != 2)
    throw DimensionError("reduced_state_conditional: expected 2x2 states");
  const PMProbeComponents probe =
      pm_components(probe_mixing_angle(g), rho_p0);
  const ConditionalUnitaries u = conditional_unitaries(g, t);
  const Matrix& rho = rho_s0.matrix();
  return DensityMatrix(probe.pp_plus * u.plus * rho * u.plus.adjoint() +
                       probe.pp_minus * u.minus * rho * u.minus.adjoint());
}

DensityMatrix closed_form_reduced_state(const QubitCouplings& g, double t,
                                        double p_s, double p_p) {
  const ConditionalUnitaries u = conditional_unitaries(g, t);
  const ClosedFormState s = reduced_state_closed_form(
      p_s, probe_mixing_angle(g), p_p, overlap_angles(u));
  return to_computational(s, u);
}

SpectralForm spectral_form(double rho00, double rho11, Complex rho01) {
  if (std::abs(rho00 + rho11 - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "spectral_form: rho00 + rho11 = " << rho00 + rho11
        << " (expected 1)";
    throw StateError(msg.str());
  }
  const double diff = rho00 - rho11;
  const double coh = std::abs(rho01);
  const double root = std::sqrt(diff * diff + 4.0 * coh * coh);

  SpectralForm sf;
  sf.e_plus = 0.5 * ((rho00 + rho11) + root);
  sf.e_minus = 0.5 * ((rho00 + rho11) - root);
  if (sf.e_minus < tol::psd_floor)
    throw StateError("spectral_form: entries do not describe a PSD state");

  Matrix m(2, 2);
  m << rho00, std::conj(rho01), rho01, rho11;
  const RealVector ev = eig_hermitian(m).values;
  if (std::abs(ev(0) - sf.e_minus) > 1e-10 ||
      std::abs(ev(1) - sf.e_plus) > 1e-10)
    throw StateError("spectral_form: eigenvalue cross-check failed");

  sf.mixing = root > 0.0 ? std::atan2(2.0 * coh, diff) : 0.0;
  sf.gamma = coh > 0.0 ? std::arg(rho01) : 0.0;
  const double c = std::cos(sf.mixing / 2);
  const double s = std::sin(sf.mixing / 2);
  const Complex phase = std::polar(1.0, sf.gamma);
  sf.psi_plus << c, s * phase;
  sf.psi_minus << s, -c * phase;
  return sf;
}

double analytic_denominator(double p_s, double theta, double alpha) {
  const double ct = std::cos(theta);
  return ct * std::pow(std::sin(alpha), 2) + p_s * ct * std::cos(2.0 * alpha) -
         p_s * ct;
}

double analytic_conditions(double p_s, double q, double theta, double alpha) {
  require_probability(p_s, "analytic_conditions: p_s");
  require_probability(q, "analytic_conditions: q");
  const double den = analytic_denominator(p_s, theta, alpha);
  if (std::abs(den) <= 1e-12) {
    std::ostringstream msg;
    msg << "analytic_conditions: denominator " << den
        << " vanishes (alpha = n pi, cos(theta) = 0 or p_s = 1/2)";
    throw DegenerateConditionError(msg.str());
  }
  const double c2 = std::pow(std::cos(theta / 2), 2);
  const double s2 = std::pow(std::sin(theta / 2), 2);
  const double sa2 = std::pow(std::sin(alpha), 2);
  const double num =
      q - p_s * c2 - s2 * sa2 - p_s * s2 * std::cos(2.0 * alpha);
  const double p_p = num / den;
  if (p_p < -1e-12 || p_p > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "analytic_conditions: required p_p = " << p_p
        << " lies outside [0, 1]";
    throw InfeasibleError(msg.str());
  }
  return std::clamp(p_p, 0.0, 1.0);
}

bool satisfies_zero_coherence(double theta, double p_p, double alpha) {
  return std::abs(std::cos(theta) * (1.0 - 2.0 * p_p) - 1.0) <= 1e-10 &&
         std::abs(std::sin(alpha)) <= 1e-10;
}

Eigen::Vector3d bloch_vector(const Matrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw DimensionError("bloch_vector: expected a 2x2 operator");
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
          (rho(0, 0) - rho(1, 1)).real()};
}

// --- control solving -------------------------------------------------------

namespace {

struct Trial {
  double theta = 0.0;
  double t = 0.0;
  double p_p = 0.0;
};

class Objective {
public:
  Objective(double p_s, const DensityMatrix& target, double g1, Complex g2)
      : p_s_(p_s), target_(target), g1_(g1), g2_(g2) {}

  QubitCouplings couplings(double theta) const {
    return {g1_, g2_, std::sin(theta), std::cos(theta)};
  }

  double operator()(const Trial& x) {
    ++evaluations;
    return trace_distance(
        closed_form_reduced_state(couplings(x.theta), x.t, p_s_, x.p_p),
        target_);
  }

  std::int64_t evaluations = 0;

private:
  double p_s_;
  const DensityMatrix& target_;
  double g1_;
  Complex g2_;
};

ControlSolution make_solution(const QubitCouplings& g, double t, double p_p,
                              double residual, double tol) {
  ControlSolution sol;
  sol.couplings = g;
  sol.theta = probe_mixing_angle(g);
  sol.alpha = overlap_angles(g, t).alpha;
  sol.p_p = p_p;
  sol.t = t;
  sol.residual = residual;
  sol.feasible = residual <= tol;
  return sol;
}

ControlSolution do_nothing(double p_s, const DensityMatrix& target,
                           double tol) {
  const double w[] = {1.0 - p_s, p_s};
  const double residual =
      trace_distance(DensityMatrix::diagonal(w), target);
  return make_solution({1.0, 0.0, 0.0, 1.0}, 0.0, 0.0, residual, tol);
}

// Rotation angle about unit axis n carrying `from` onto `to` (both assumed to
// share the same component along n), in [0, 2 pi).
double rotation_angle(const Eigen::Vector3d& n, const Eigen::Vector3d& from,
                      const Eigen::Vector3d& to) {
  const Eigen::Vector3d fp = from - from.dot(n) * n;
  const Eigen::Vector3d tp = to - to.dot(n) * n;
  double chi = std::atan2(n.dot(fp.cross(tp)), fp.dot(tp));
  if (chi < 0.0)
    chi += 2.0 * kPi;
  return chi;
}

// Exact steering on the Bloch ball.
//
// With unit system factor n.sigma and unit probe strength the two branches
// rotate the initial Bloch vector s0 z by +-2t about n, and the output is
// s0 (w a + (1 - w) c) with w = rho++. Writing b = b_target / s0:
//   * |b| = 1: one branch (w = 1) rotating z onto b.
//   * |b| < 1: b is the midpoint (w = 1/2) of the chord through b orthogonal
//     to span(z, b); its endpoints are mirror images across that plane, so a
//     single axis n in the plane, orthogonal to z - b, carries z onto both.
// Targets with |b| > 1 are projected radially onto the sphere first, which
// is the closest reachable state in trace distance.
ControlSolution construct_controls(double p_s, const DensityMatrix& target,
                                   double tol) {
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const double s0 = 1.0 - 2.0 * p_s;
  if (std::abs(s0) < 1e-12)
    return do_nothing(p_s, target, tol);

  Eigen::Vector3d b = bloch_vector(target.matrix()) / s0;
  if (b.norm() > 1.0)
    b.normalize();
  if ((b - z).norm() <= 1e-12)
    return do_nothing(p_s, target, tol);

  Eigen::Vector3d n;
  double chi = 0.0;
  double p_p = 0.0;
  if (b.norm() >= 1.0 - 1e-12) {
    Eigen::Vector3d axis = z.cross(b);
    if (axis.norm() < 1e-12)
      axis = Eigen::Vector3d::UnitX();
    n = axis.normalized();
    chi = rotation_angle(n, z, b);
  } else {
    Eigen::Vector3d m = z.cross(b);
    if (m.norm() < 1e-12)
      m = Eigen::Vector3d::UnitY();
    m.normalize();
    const Eigen::Vector3d a = b + std::sqrt(1.0 - b.squaredNorm()) * m;
    n = m.cross(z - b).normalized();
    chi = rotation_angle(n, z, a);
    p_p = 0.5;
  }

  // theta = 0: the probe factor is sz, |+>_p = |1>_p and rho++ = 1 - p_p.
  const QubitCouplings g{n.z(), Complex(n.x(), -n.y()), 0.0, 1.0};
  const double t = 0.5 * chi;
  const double residual =
      trace_distance(closed_form_reduced_state(g, t, p_s, p_p), target);
  ControlSolution sol = make_solution(g, t, p_p, residual, tol);
  sol.evaluations = 1;
  return sol;
}

} // namespace

ControlSolution search_controls_lattice(double p_s, const DensityMatrix& target,
                                        double g1, Complex g2,
                                        const SolverBudget& budget) {
  require_probability(p_s, "search_controls_lattice: p_s");
  if (target.dim() != 2)
    throw DimensionError("search_controls_lattice: target must be 2x2");
  const double axis = std::hypot(g1, std::abs(g2));
  if (axis == 0.0)
    throw DomainError("search_controls_lattice: system factor is zero");
  g1 /= axis;
  g2 /= axis;

  // Keep the lattice within half of the evaluation budget so refinement
  // always has room.
  int n = std::max(2, budget.lattice);
  while (n > 2 && 2 * static_cast<std::int64_t>(n) * n * n >
                      budget.max_evaluations)
    --n;

  Objective f(p_s, target, g1, g2);
  const double d_theta = kPi / (n - 1);
  const double d_t = kPi / n;
  const double d_p = 1.0 / (n - 1);

  Trial best;
  double best_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Trial x{i * d_theta, j * d_t, k * d_p};
        const double r = f(x);
        if (r < best_r) {
          best_r = r;
          best = x;
        }
      }

  double steps[3] = {d_theta, d_t, d_p};
  while (best_r > budget.tol && f.evaluations < budget.max_evaluations &&
         std::max({steps[0], steps[1], steps[2]}) > 1e-13) {
    bool improved = false;
    for (int axis_id = 0; axis_id < 3; ++axis_id) {
      for (double sign : {1.0, -1.0}) {
        Trial x = best;
        double* coord = axis_id == 0 ? &x.theta : axis_id == 1 ? &x.t : &x.p_p;
        *coord += sign * steps[axis_id];
        x.theta = std::clamp(x.theta, 0.0, kPi);
        x.p_p = std::clamp(x.p_p, 0.0, 1.0);
        const double r = f(x);
        if (r < best_r) {
          best_r = r;
          best = x;
          improved = true;
          break;
        }
      }
    }
    if (!improved)
      for (double& s : steps)
        s *= 0.5;
  }

  ControlSolution sol = make_solution(f.couplings(best.theta), best.t,
                                      best.p_p, best_r, budget.tol);
  sol.evaluations = f.evaluations;
  return sol;
}

ControlSolution solve_controls_numeric(double p_s, const DensityMatrix& target,
                                       const SolverBudget& budget) {
  require_probability(p_s, "solve_controls_numeric: p_s");
  if (target.dim() != 2)
    throw DimensionError("solve_controls_numeric: target must be 2x2");

  ControlSolution best = construct_controls(p_s, target, budget.tol);
  if (best.feasible)
    return best;

  SolverBudget rest = budget;
  rest.max_evaluations = std::max<std::int64_t>(
      0, budget.max_evaluations - best.evaluations);
  ControlSolution searched = search_controls_lattice(
      p_s, target, best.couplings.g1, best.couplings.g2, rest);
  searched.evaluations += best.evaluations;
  if (searched.residual < best.residual)
    return searched;
  best.evaluations = searched.evaluations;
  return best;
}

} // namespace iqc
