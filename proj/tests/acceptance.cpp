// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is nonzero when any criterion fails, except those listed in
// kKnownFailures. Those are still run in full and reported as FAIL; the exit
// status flips if one of them starts passing so the list cannot go stale.

#include "iqc/cli.hpp"
#include "iqc/nlevel.hpp"
#include "iqc/probe_prep.hpp"
#include "iqc/qubit.hpp"
#include "iqc/verify.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace iqc;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

// Gap-domain thermal round trip over [-50T, 50T]: occupancies within ~1e-16
// of 1 collapse to 1.0 in double precision, so the gap cannot be recovered.
const std::set<int> kKnownFailures = {8};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

QubitCouplings bounded_couplings(oracle::Rng& rng, double bound) {
  // Uniform direction in R^5 (g2 complex), radius uniform in [0, bound].
  Eigen::Matrix<double, 5, 1> v;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 5; ++k)
    v(k) = n(rng);
  v *= oracle::uniform(rng, 0.0, bound) / v.norm();
  return {v(0), {v(1), v(2)}, v(3), v(4)};
}

Verdict criterion1() {
  oracle::Rng rng(1001);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const QubitCouplings g = bounded_couplings(rng, 2.0);
    const double t = oracle::uniform(rng, 0.0, 10.0);

    // Arbitrary product state, probe coherences included.
    const DensityMatrix rs = oracle::random_density(rng, 2);
    const DensityMatrix rp = oracle::random_density(rng, 2);
    const DensityMatrix full =
        evolve_full(CompositeScenario(build_interaction(g), rs, rp), t);
    worst = std::max(worst,
                     trace_distance(full, reduced_state_conditional(g, t, rs, rp)));

    // Canonical diagonal states through the closed-form entries.
    const double ps = oracle::uniform(rng), pp = oracle::uniform(rng);
    worst = std::max(worst, trace_distance(evolve_full(qubit_scenario(g, ps, pp), t),
                                           closed_form_reduced_state(g, t, ps, pp)));
  }
  return {worst <= 1e-10, "max trace distance " + sci(worst) + " over 200 scenarios"};
}

Verdict criterion2() {
  oracle::Rng rng(1002);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + k % 3;
    const ProductHamiltonian h(oracle::random_hermitian(rng, n),
                               oracle::random_hermitian(rng, n));
    const double t = oracle::uniform(rng, 0.0, 10.0);
    const Matrix full = expm_i_hermitian(h.full(), t);
    worst = std::max(worst, oracle::max_abs(recombine(conditional_decomposition(h, t)) - full));
  }
  return {worst <= 1e-10, "max entry error " + sci(worst) + " over 100 instances"};
}

Verdict criterion3() {
  oracle::Rng rng(1003);
  double worst_spec = 0.0, worst_td = 0.0;
  for (int k = 0; k < 100; ++k) {
    const LocalRotation r{oracle::uniform(rng, 0.0, pi), oracle::uniform(rng, 0.0, 2 * pi)};
    const QubitCouplings g = bounded_couplings(rng, 2.0);
    const double t = oracle::uniform(rng, 0.0, 10.0);
    const DensityMatrix rs = oracle::random_density(rng, 2);
    const DensityMatrix rp = oracle::random_density(rng, 2);
    const Matrix f = r.matrix();

    const DensityMatrix plain =
        evolve_full(CompositeScenario(build_interaction(g), rs, rp), t);
    const DensityMatrix moved = evolve_full(
        CompositeScenario(build_interaction(transform_couplings(r, g)),
                          DensityMatrix(f * rs.matrix() * f.adjoint()), rp),
        t);
    worst_spec = std::max(worst_spec,
                          (plain.spectrum() - moved.spectrum()).cwiseAbs().maxCoeff());
    worst_td = std::max(worst_td, trace_distance(f.adjoint() * moved.matrix() * f,
                                                 plain.matrix()));
  }
  return {worst_spec <= 1e-10 && worst_td <= 1e-10,
          "spectrum gap " + sci(worst_spec) + ", trace distance " + sci(worst_td)};
}

Verdict criterion4() {
  oracle::Rng rng(1004);
  double completeness = 0.0, trace_err = 0.0, min_eig = 1.0, coherence = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + k % 3;
    const ProductHamiltonian h(oracle::random_hermitian(rng, n),
                               oracle::random_hermitian(rng, n));
    const double t = oracle::uniform(rng, 0.0, 5.0);
    const ConditionalDecomposition d = conditional_decomposition(h, t);
    const DensityMatrix probe = oracle::random_density(rng, n);
    const KrausChannel ch = kraus_from_probe(d, probe);
    completeness = std::max(completeness, ch.completeness_defect());

    const DensityMatrix rs = oracle::random_density(rng, n);
    const DensityMatrix out = apply_channel(ch, rs);
    trace_err = std::max(trace_err, std::abs(out.matrix().trace() - 1.0));
    min_eig = std::min(min_eig, out.spectrum().minCoeff());

    if (n == 3) {
      // Full evolution with the coherent probe vs the channel, which only
      // sees the probe's diagonal in the h_p eigenbasis.
      const DensityMatrix full =
          evolve_full(CompositeScenario(h.full(), rs, probe), t);
      coherence = std::max(coherence, trace_distance(full, out));
    }
  }
  const bool ok = completeness <= 1e-10 && trace_err <= 1e-12 &&
                  min_eig >= -1e-10 && coherence <= 1e-10;
  return {ok, "completeness " + sci(completeness) + ", trace " + sci(trace_err) +
                  ", min eigenvalue " + sci(min_eig) + ", N=3 coherence " +
                  sci(coherence)};
}

// Largest eigenvalue reachable from weight p_s on |0>, scanned over a
// (theta, t, p_p) grid of closed-form states with a fixed generic axis.
double scan_max_weight(double p_s) {
  double best = 0.0;
  const int n = 24;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double theta = pi * i / (n - 1);
        const QubitCouplings g{0.6, 0.8, std::sin(theta), std::cos(theta)};
        const double t = pi * j / n;
        const double pp = static_cast<double>(k) / (n - 1);
        const ClosedFormState s = reduced_state_closed_form(
            p_s, theta, pp, overlap_angles(g, t));
        best = std::max(best, spectral_form(s.rho00, s.rho11, s.rho01()).e_plus);
      }
  return best;
}

Verdict criterion5() {
  oracle::Rng rng(1005);
  // The scan bound for pure initial states is 1; mixed p_s = 0.3 caps at 0.7.
  const double q_pure = scan_max_weight(0.0);
  const double q_mixed = scan_max_weight(0.3);

  double worst = 0.0;
  int solved = 0;
  for (int k = 0; k < 50; ++k) {
    const double ps = k % 2 ? 1.0 : 0.0;
    const double q = oracle::uniform(rng, 0.5, 1.0) * q_pure;
    const Vector psi = oracle::random_state(rng, 2);
    const Vector perp = complete_basis(psi).col(1);
    const DensityMatrix target(q * psi * psi.adjoint() +
                               (1 - q) * perp * perp.adjoint());
    const ControlSolution sol = solve_controls_numeric(ps, target);
    const double d = check_solution(sol, ps, target);
    worst = std::max(worst, d);
    solved += sol.feasible && d <= 1e-6;
  }

  int flagged = 0;
  const int infeasible = 10;
  for (int k = 0; k < infeasible; ++k) {
    const double q = oracle::uniform(rng, q_mixed + 0.05, 1.0);
    const Vector psi = oracle::random_state(rng, 2);
    const Vector perp = complete_basis(psi).col(1);
    const DensityMatrix target(q * psi * psi.adjoint() +
                               (1 - q) * perp * perp.adjoint());
    const ControlSolution sol = solve_controls_numeric(0.3, target);
    flagged += !sol.feasible && check_solution(sol, 0.3, target) > 1e-6;
  }
  const bool ok = solved == 50 && flagged == infeasible &&
                  std::abs(q_pure - 1.0) <= 1e-6 && std::abs(q_mixed - 0.7) <= 1e-6;
  return {ok, std::to_string(solved) + "/50 solved (max oracle residual " + sci(worst) +
                  "), " + std::to_string(flagged) + "/" + std::to_string(infeasible) +
                  " infeasible flagged, scan bounds " + sci(q_pure) + ", " +
                  sci(q_mixed)};
}

Verdict criterion6() {
  oracle::Rng rng(1006);
  int evaluated = 0, in_range = 0;
  double worst = 0.0;
  while (evaluated < 1000) {
    const double ps = oracle::uniform(rng);
    const double theta = oracle::uniform(rng, 0.0, pi);
    const double alpha = oracle::uniform(rng, 0.0, pi / 2);
    if (std::abs(analytic_denominator(ps, theta, alpha)) <= 1e-3)
      continue;
    ++evaluated;
    const double q = oracle::uniform(rng);
    double pp = 0.0;
    try {
      pp = analytic_conditions(ps, q, theta, alpha);
    } catch (const InfeasibleError&) {
      continue;
    }
    ++in_range;
    const double beta = oracle::uniform(rng, -pi, pi);
    const ClosedFormState s = reduced_state_closed_form(ps, theta, pp, {alpha, beta});
    worst = std::max(worst, std::abs(s.rho00 - q));
  }

  int degenerate = 0;
  for (int n = 0; n <= 4; ++n) {
    try {
      analytic_conditions(0.3, 0.5, 0.7, n * pi);
    } catch (const DegenerateConditionError&) {
      ++degenerate;
    }
  }
  const bool ok = in_range > 0 && worst <= 1e-8 && degenerate == 5;
  return {ok, std::to_string(in_range) + "/1000 in [0,1], max |rho00 - q| " +
                  sci(worst) + ", " + std::to_string(degenerate) +
                  "/5 alpha = n pi raised"};
}

Verdict criterion7() {
  oracle::Rng rng(1007);
  double worst_feasible = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = 2 + k % 2;
    const Matrix hs = oracle::random_hermitian(rng, n);
    const RealVector e = eig_hermitian(oracle::random_hermitian(rng, n)).values;
    const RealVector p = oracle::random_simplex(rng, n);
    const RealVector w = oracle::random_simplex(rng, n);
    const double t = oracle::uniform(rng, 0.2, 3.0);
    const ReachabilityProblem prob =
        forward_reachability_problem(hs, {e.data(), std::size_t(n)}, t, p, w);
    worst_feasible = std::max(worst_feasible, solve_probe_spectrum(prob).residual);
  }

  double best_infeasible = 1.0;
  for (int k = 0; k < 10; ++k) {
    const Index n = 2 + k % 2;
    ReachabilityProblem prob;
    prob.initial_weights = oracle::random_simplex(rng, n);
    // A target whose sorted spectrum differs by at least 0.05 in 2-norm; a
    // single energy makes the channel unitary, so the spectrum is fixed.
    do {
      prob.target_weights = oracle::random_simplex(rng, n);
      RealVector a = prob.initial_weights, b = prob.target_weights;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if ((a - b).norm() >= 0.05)
        break;
    } while (true);
    const std::vector<double> energies(std::size_t(n), oracle::uniform(rng, -2.0, 2.0));
    prob.coefficients = expansion_coefficients(oracle::random_hermitian(rng, n), energies,
                                               oracle::uniform(rng, 0.2, 3.0),
                                               oracle::uniform(rng, 0.0, 3.0));
    best_infeasible = std::min(best_infeasible, solve_probe_spectrum(prob).residual);
  }
  return {worst_feasible <= 1e-8 && best_infeasible > 1e-3,
          "forward max residual " + sci(worst_feasible) +
              ", incompatible min residual " + sci(best_infeasible)};
}

Verdict criterion8() {
  oracle::Rng rng(1008);
  double worst_gap = 0.0, worst_gap_small = 0.0, worst_p = 0.0;
  int collapsed = 0;
  for (int k = 0; k < 1000; ++k) {
    const double temp = oracle::uniform(rng, 0.1, 10.0);
    const double gap = oracle::uniform(rng, -50.0, 50.0) * temp;
    const double p = thermal_occupancy({0.0, gap, temp});
    double err = 0.0;
    try {
      err = std::abs(required_gap(p, temp) - gap);
    } catch (const InfeasibleError&) {
      ++collapsed; // p rounded to exactly 1
      err = std::numeric_limits<double>::infinity();
    }
    worst_gap = std::max(worst_gap, err);
    if (gap <= 0.0)
      worst_gap_small = std::max(worst_gap_small, err);

    const double q = oracle::uniform(rng, 1e-6, 1.0 - 1e-6);
    worst_p = std::max(worst_p,
                       std::abs(thermal_occupancy({0.0, required_gap(q, temp), temp}) - q));
  }
  int raised = 0;
  for (double p : {0.0, 1.0}) {
    try {
      required_gap(p, 1.0);
    } catch (const InfeasibleError&) {
      ++raised;
    }
  }
  const bool ok = worst_gap <= 1e-12 && raised == 2;
  return {ok, "gap->p->gap max error " + sci(worst_gap) + " (" +
                  std::to_string(collapsed) + " occupancies rounded to 1; " +
                  "non-positive gaps " + sci(worst_gap_small) + "), p->gap->p " +
                  sci(worst_p) + ", " + std::to_string(raised) + "/2 boundaries raised"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Verdict criterion9() {
  const fs::path configs = IQC_CONFIG_DIR;
  const fs::path base = fs::temp_directory_path() / "iqc_acceptance";
  fs::remove_all(base);
  const fs::path a = base / "a", b = base / "b";

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(configs))
    if (entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  int identical = 0, errors = 0;
  bool rows_ok = true;
  std::ostringstream sink;
  for (const fs::path& cfg : files) {
    const std::string mode = nlohmann::json::parse(slurp(cfg))["mode"];
    const auto exec = mode == "sweep" ? cli::sweep : cli::run;
    for (const fs::path& out : {a, b}) {
      const int code = exec(cfg, {out, true, false}, sink, sink);
      errors += code == cli::kError;
    }
    const std::string name =
        cfg.stem().string() + (mode == "sweep" || mode == "simulate" ? ".csv" : ".json");
    const std::string first = slurp(a / name);
    identical += !first.empty() && first == slurp(b / name);

    if (mode == "sweep") {
      const auto doc = nlohmann::json::parse(slurp(cfg));
      long long cells = 1;
      for (const char* axis : {"theta", "alpha", "p_p"}) {
        const auto& ax = doc["axes"][axis];
        cells *= ax.is_number() ? 1 : ax["count"].get<long long>();
      }
      const auto lines = std::count(first.begin(), first.end(), '\n');
      rows_ok = rows_ok && lines - 1 == cells;
    }
  }
  fs::remove_all(base);
  const int total = static_cast<int>(files.size());
  return {identical == total && errors == 0 && rows_ok && total > 0,
          std::to_string(identical) + "/" + std::to_string(total) +
              " outputs byte-identical, sweep row counts " +
              (rows_ok ? "match" : "differ")};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s; // 0 when no runtime bound applies
    std::function<Verdict()> body;
  };
  const Criterion criteria[] = {
      {1, "conditional decomposition vs full evolution", 5.0, criterion1},
      {2, "N-level factorization", 10.0, criterion2},
      {3, "local rotation invariance", 0.0, criterion3},
      {4, "Kraus channel laws", 0.0, criterion4},
      {5, "control solver end to end", 60.0, criterion5},
      {6, "analytic probe occupancy consistency", 0.0, criterion6},
      {7, "reachability forward/inverse", 0.0, criterion7},
      {8, "thermal round trip", 0.0, criterion8},
      {9, "CLI determinism", 0.0, criterion9},
  };

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = v.pass;
    std::string timing = std::to_string(secs).substr(0, 5) + " s";
    if (c.limit_s > 0.0) {
      timing += " (limit " + std::to_string(static_cast<int>(c.limit_s)) + " s)";
      pass = pass && secs <= c.limit_s;
    }
    const bool known = kKnownFailures.count(c.id) > 0;
    std::printf("%s %d %s: %s [%s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), timing.c_str(),
                known ? (pass ? " (listed as known failure but passed)"
                              : " (known, documented)")
                      : "");
    unexpected += pass == known;
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
