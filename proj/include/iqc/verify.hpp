#pragma once

// Brute-force reference: exponentiate the full composite Hamiltonian and
// trace out the probe. Only kron, expm_i_hermitian and partial_trace_probe
// are used here, never the conditional decompositions under test.

#include "iqc/opkit.hpp"
#include "iqc/qubit.hpp"

#include <vector>

namespace iqc {

struct CompositeScenario {
  Index dim_s = 0;
  Index dim_p = 0;
  Matrix h_full;
  DensityMatrix rho_s0;
  DensityMatrix rho_p0;
  std::vector<double> times;

  CompositeScenario(Matrix h_full, DensityMatrix rho_s0, DensityMatrix rho_p0,
                    std::vector<double> times = {});
};

/// Tr_p[ exp(-i H t) (rho_s0 (x) rho_p0) exp(+i H t) ].
DensityMatrix evolve_full(const CompositeScenario& sc, double t);

/// Evolve the composite state and return it whole (no partial trace).
DensityMatrix evolve_composite(const CompositeScenario& sc, double t);

/// Qubit scenario with the canonical system state (weight p_s on |0>) and
/// the diagonal probe (weight p_p on |0>).
CompositeScenario qubit_scenario(const QubitCouplings& g, double p_s,
                                 double p_p);

/// Trace distance between the target and the reduced state obtained by
/// running the solution's couplings, time and probe occupancy through
/// evolve_full.
double check_solution(const ControlSolution& sol, double p_s,
                      const DensityMatrix& target);

} // namespace iqc
