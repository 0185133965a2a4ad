#include "iqc/verify.hpp"

#include <sstream>

namespace iqc {

CompositeScenario::CompositeScenario(Matrix h, DensityMatrix s, DensityMatrix p,
                                     std::vector<double> ts)
    : dim_s(s.dim()), dim_p(p.dim()), h_full(std::move(h)), rho_s0(std::move(s)),
      rho_p0(std::move(p)), times(std::move(ts)) {
  if (h_full.rows() != dim_s * dim_p || h_full.cols() != dim_s * dim_p) {
    std::ostringstream msg;
    msg << "CompositeScenario: Hamiltonian is " << h_full.rows() << "x"
        << h_full.cols() << ", expected " << dim_s * dim_p << " square";
    throw DimensionError(msg.str());
  }
  if (!is_hermitian(h_full))
    throw HermiticityError("CompositeScenario: Hamiltonian is not Hermitian");
}

DensityMatrix evolve_composite(const CompositeScenario& sc, double t) {
  const Matrix u = expm_i_hermitian(sc.h_full, t);
  const Matrix rho0 = kron(sc.rho_s0.matrix(), sc.rho_p0.matrix());
  return DensityMatrix(u * rho0 * u.adjoint());
}

DensityMatrix evolve_full(const CompositeScenario& sc, double t) {
  return partial_trace_probe(evolve_composite(sc, t), sc.dim_s, sc.dim_p);
}

CompositeScenario qubit_scenario(const QubitCouplings& g, double p_s,
                                 double p_p) {
  return CompositeScenario(build_interaction(g),
                           DiagonalQubitState{p_s}.density(),
                           DiagonalQubitState{p_p}.density());
}

double check_solution(const ControlSolution& sol, double p_s,
                      const DensityMatrix& target) {
  if (target.dim() != 2)
    throw DimensionError("check_solution: target must be 2x2");
  return trace_distance(
      evolve_full(qubit_scenario(sol.couplings, p_s, sol.p_p), sol.t), target);
}

} // namespace iqc
