#pragma once

#include <stdexcept>
#include <string>

namespace ftlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FTLAB_DEFINE_ERROR(Name)      \
    struct Name : Error {             \
        using Error::Error;           \
    }

FTLAB_DEFINE_ERROR(NonHyperbolic);
FTLAB_DEFINE_ERROR(OutOfDomain);
FTLAB_DEFINE_ERROR(NoEntropy);
FTLAB_DEFINE_ERROR(LeftDomain);
FTLAB_DEFINE_ERROR(ContinuationFailure);
FTLAB_DEFINE_ERROR(LaxViolation);
FTLAB_DEFINE_ERROR(NoChart);
FTLAB_DEFINE_ERROR(NewtonDivergence);
FTLAB_DEFINE_ERROR(FanOrderingViolation);
FTLAB_DEFINE_ERROR(DomainViolation);
FTLAB_DEFINE_ERROR(InteractionOverflow);
FTLAB_DEFINE_ERROR(TraceUnavailable);
FTLAB_DEFINE_ERROR(WeightBracketViolation);
FTLAB_DEFINE_ERROR(CRangeViolation);
FTLAB_DEFINE_ERROR(ResolutionTooCoarse);
FTLAB_DEFINE_ERROR(ConfigError);

#undef FTLAB_DEFINE_ERROR

}  // namespace ftlab
