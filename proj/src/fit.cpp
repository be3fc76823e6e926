#include "ftlab/fit.hpp"

#include <cmath>
#include <cstddef>

namespace ftlab {

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y, int min_points, double min_r2) {
    SlopeFit f;
    const std::size_t n = std::min(x.size(), y.size());
    f.n = static_cast<int>(n);
    if (n < 2) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    f.conclusive = f.n >= min_points && f.r2 >= min_r2;
    return f;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, int min_points, double min_r2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    return fit_line(lx, ly, min_points, min_r2);
}

}  // namespace ftlab
