#pragma once

#include <stdexcept>
#include <string>

namespace iqc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define IQC_DEFINE_ERROR(Name)                                                 \
  struct Name : Error {                                                        \
    using Error::Error;                                                        \
  }

IQC_DEFINE_ERROR(DimensionError);
IQC_DEFINE_ERROR(HermiticityError);
IQC_DEFINE_ERROR(StateError);
IQC_DEFINE_ERROR(NormalizationError);
IQC_DEFINE_ERROR(ProbabilityError);
IQC_DEFINE_ERROR(DegenerateProbeError);
IQC_DEFINE_ERROR(DegenerateConditionError);
IQC_DEFINE_ERROR(InfeasibleError);
IQC_DEFINE_ERROR(DomainError);
IQC_DEFINE_ERROR(ConfigError);

#undef IQC_DEFINE_ERROR

} // namespace iqc
