#pragma once

#include <stdexcept>
#include <string>

namespace d2alf {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define D2ALF_ERROR_TYPE(Name)                         \
    struct Name : Error {                              \
        explicit Name(const std::string& msg = #Name)  \
            : Error(std::string(#Name) + ": " + msg) {}\
    }

D2ALF_ERROR_TYPE(NotSkewHermitian);
D2ALF_ERROR_TYPE(NotPositiveDefinite);
D2ALF_ERROR_TYPE(GridMismatch);
D2ALF_ERROR_TYPE(InvalidSize);
D2ALF_ERROR_TYPE(InvalidParams);
D2ALF_ERROR_TYPE(XiMismatch);
D2ALF_ERROR_TYPE(BoundaryViolation);
D2ALF_ERROR_TYPE(Degenerate);
D2ALF_ERROR_TYPE(UnstableInput);
D2ALF_ERROR_TYPE(NoConvergence);
D2ALF_ERROR_TYPE(IllConditioned);
D2ALF_ERROR_TYPE(NotIrreducible);
D2ALF_ERROR_TYPE(WrongDimension);
D2ALF_ERROR_TYPE(Reducible);
D2ALF_ERROR_TYPE(PathHitsWall);
D2ALF_ERROR_TYPE(NonConstantAlpha);
D2ALF_ERROR_TYPE(SignConditionViolated);
D2ALF_ERROR_TYPE(NonCommuting);
D2ALF_ERROR_TYPE(NonIsolatedAction);
D2ALF_ERROR_TYPE(NonConvergedPoints);
D2ALF_ERROR_TYPE(ConfigError);

#undef D2ALF_ERROR_TYPE

}  // namespace d2alf
