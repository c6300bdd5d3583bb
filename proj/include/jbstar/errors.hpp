#pragma once

#include <stdexcept>
#include <string>

namespace jbstar {

// Base for all library errors. Each contract violation gets its own type so
// callers can react per failure mode.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define JBSTAR_DEFINE_ERROR(NAME)                               \
  struct NAME : Error {                                         \
    explicit NAME(const std::string& msg = #NAME) : Error(msg) {} \
  }

JBSTAR_DEFINE_ERROR(NotHermitian);
JBSTAR_DEFINE_ERROR(NotNormal);
JBSTAR_DEFINE_ERROR(NoConvergence);
JBSTAR_DEFINE_ERROR(ModelMismatch);
JBSTAR_DEFINE_ERROR(InvalidParameter);
JBSTAR_DEFINE_ERROR(NotInvertible);
JBSTAR_DEFINE_ERROR(NotTripotent);
JBSTAR_DEFINE_ERROR(NotUnitary);
JBSTAR_DEFINE_ERROR(BranchCut);
JBSTAR_DEFINE_ERROR(BranchCutExhausted);
JBSTAR_DEFINE_ERROR(DegenerateCluster);
JBSTAR_DEFINE_ERROR(NoSpectralGap);
JBSTAR_DEFINE_ERROR(TooFar);
JBSTAR_DEFINE_ERROR(HypothesisNotMet);
JBSTAR_DEFINE_ERROR(StructureMismatch);
JBSTAR_DEFINE_ERROR(DomainExceeded);
JBSTAR_DEFINE_ERROR(GroupLawViolated);
JBSTAR_DEFINE_ERROR(LogBranchFailure);
JBSTAR_DEFINE_ERROR(CentralSymmetryFailure);
JBSTAR_DEFINE_ERROR(ExtensionMismatch);
JBSTAR_DEFINE_ERROR(ConfigError);

#undef JBSTAR_DEFINE_ERROR

}  // namespace jbstar
