#pragma once

#include <stdexcept>
#include <string>

namespace dislocore {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define DISLOCORE_DEFINE_ERROR(Name)                                           \
    struct Name : Error {                                                       \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}    \
    }

DISLOCORE_DEFINE_ERROR(OutsideDomain);
DISLOCORE_DEFINE_ERROR(DegenerateBoundary);
DISLOCORE_DEFINE_ERROR(EmptyConfiguration);
DISLOCORE_DEFINE_ERROR(ParameterOrder);
DISLOCORE_DEFINE_ERROR(SolverFailure);
DISLOCORE_DEFINE_ERROR(StencilOutsideDomain);
DISLOCORE_DEFINE_ERROR(CoincidentDislocations);
DISLOCORE_DEFINE_ERROR(EvaluationAtSingularity);
DISLOCORE_DEFINE_ERROR(LoopIntersectsSingularity);
DISLOCORE_DEFINE_ERROR(CoresOverlap);
DISLOCORE_DEFINE_ERROR(QuadratureNotConverged);
DISLOCORE_DEFINE_ERROR(NotInRegion);
DISLOCORE_DEFINE_ERROR(BoundDegenerate);
DISLOCORE_DEFINE_ERROR(JumpMismatch);
DISLOCORE_DEFINE_ERROR(CoreOverlap);
DISLOCORE_DEFINE_ERROR(NoDescentDirection);
DISLOCORE_DEFINE_ERROR(AllStartsDiverged);
DISLOCORE_DEFINE_ERROR(ConfigError);

#undef DISLOCORE_DEFINE_ERROR

} // namespace dislocore
