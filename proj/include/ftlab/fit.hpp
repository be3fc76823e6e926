#pragma once

#include <vector>

namespace ftlab {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
    bool conclusive = false;  // n >= min_points and r2 >= min_r2
};

// Least-squares line through (log x, log y); nonpositive entries are dropped.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, int min_points = 4,
                    double min_r2 = 0.9);

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y, int min_points = 4,
                  double min_r2 = 0.9);

}  // namespace ftlab
