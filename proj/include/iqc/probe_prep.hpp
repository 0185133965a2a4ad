#pragma once

// Thermal preparation of the two-level probe (k_B = 1).

namespace iqc {

struct ThermalSpec {
  double e0 = 0.0; // energy of |0>
  double e1 = 0.0; // energy of |1>
  double temperature = 1.0;
};

/// Equilibrium ground-state weight e^{-E0/T} / (e^{-E0/T} + e^{-E1/T}),
/// evaluated as a logistic in (e1 - e0)/T. Throws DomainError for T <= 0.
double thermal_occupancy(const ThermalSpec& spec);

/// Energy gap e1 - e0 giving occupancy p_p at temperature T.
/// Throws InfeasibleError for p_p in {0, 1}, DomainError outside [0, 1] or
/// for T <= 0.
double required_gap(double p_p, double temperature);

} // namespace iqc
