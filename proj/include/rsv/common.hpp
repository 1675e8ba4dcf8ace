#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rsv {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr Complex kI{0.0, 1.0};

// Base class for all workbench errors.  Every named failure mode gets its
// own type so callers (and tests) can discriminate without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define RSV_ERROR(Name)                    \
    struct Name : ::rsv::Error {           \
        using ::rsv::Error::Error;         \
    }

RSV_ERROR(NonPositiveImGamma);
RSV_ERROR(TruncationOverflow);
RSV_ERROR(OrderTooHigh);
RSV_ERROR(UnsupportedBackend);
RSV_ERROR(BranchAmbiguity);
RSV_ERROR(ThetaVanishes);
RSV_ERROR(PoleHit);
RSV_ERROR(PoleCollision);
RSV_ERROR(CoincidentPoles);
RSV_ERROR(RamifiedFiber);
RSV_ERROR(FiberIncomplete);
RSV_ERROR(SpectrumHit);
RSV_ERROR(SingularBlock);
RSV_ERROR(OrderingMismatch);
RSV_ERROR(SingularCurvePoint);
RSV_ERROR(OffCurve);
RSV_ERROR(DegenerateDet);
RSV_ERROR(QuadratureDivergence);
RSV_ERROR(ConfigError);
RSV_ERROR(IllConditioned);

#undef RSV_ERROR

}  // namespace rsv
