#pragma once

#include <vector>

#include "sc/types.hpp"

namespace sc {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};

/// Least squares on (log x, log y), skipping points with y at or below
/// `floor` (noise floor, default 100 * machine epsilon). Throws TooFewPoints
/// if fewer than 4 usable samples remain.
FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                     double floor = -1.0);

}  // namespace sc
