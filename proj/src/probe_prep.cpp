#include "iqc/probe_prep.hpp"

#include "iqc/errors.hpp"

#include <cmath>
#include <sstream>

namespace iqc {

namespace {

void require_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    std::ostringstream msg;
    msg << "temperature must be positive and finite, got " << temperature;
    throw DomainError(msg.str());
  }
}

} // namespace

double thermal_occupancy(const ThermalSpec& spec) {
  require_temperature(spec.temperature);
  const double x = (spec.e1 - spec.e0) / spec.temperature;
  // 1 / (1 + e^{-x}) written so that neither branch overflows.
  if (x >= 0.0)
    return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double required_gap(double p_p, double temperature) {
  require_temperature(temperature);
  if (!(p_p >= 0.0 && p_p <= 1.0)) {
    std::ostringstream msg;
    msg << "required_gap: p_p must lie in [0, 1], got " << p_p;
    throw DomainError(msg.str());
  }
  if (p_p == 0.0 || p_p == 1.0)
    throw InfeasibleError(
        "required_gap: a pure probe needs an infinite energy gap");
  // log(p / (1 - p)) with log1p keeps precision near both ends.
  return temperature * (std::log(p_p) - std::log1p(-p_p));
}

} // namespace iqc
