#pragma once

#include <span>

#include "rssiloc/vec3.hpp"

namespace rssiloc::oracle {

/// A receiver position and the range measured from it.
struct RangeMeasurement {
    Vec3 anchor;
    double range = 0.0;
};

struct FitResult {
    Vec3 position;
    double cost = 0.0;  ///< sum of squared range residuals at `position`
    int iterations = 0;
};

/// Brute-force multilateration: minimizes sum (|s - p_i| - d_i)^2 over s with
/// z >= 0, starting from the best point of a coarse grid and polishing with
/// Levenberg-Marquardt. Slow and general; it shares no algebra with the
/// closed-form solvers and exists to check them.
FitResult least_squares_source(std::span<const RangeMeasurement> measurements);

}  // namespace rssiloc::oracle
