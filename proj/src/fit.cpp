#include "sc/fit.hpp"

#include <cmath>
#include <limits>

namespace sc {

FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys, double floor) {
    if (floor < 0.0) floor = 100.0 * std::numeric_limits<double>::epsilon();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > floor) || !std::isfinite(ys[i])) continue;
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    const std::size_t n = lx.size();
    if (n < 4) throw TooFewPoints("need at least 4 usable points for a rate fit");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    FitResult f;
    f.points_used = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

}  // namespace sc
