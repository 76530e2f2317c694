#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace weyllab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual = 0.0; // weighted RMS residual
    std::size_t points = 0;
};

// Weighted least squares y ~ slope x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w = {})
{
    const std::size_t m = x.size();
    if (m < 2 || y.size() != m || (!w.empty() && w.size() != m)) throw DomainError("fit_line needs >= 2 matching samples");
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sxx += wi * (x[i] - mx) * (x[i] - mx);
        sxy += wi * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw NumericError("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += wi * r * r;
    }
    f.residual = std::sqrt(ss / sw);
    f.slope_stderr = m > 2 ? std::sqrt(ss / (static_cast<double>(m - 2)) / sxx) : 0.0;
    f.points = m;
    return f;
}

// Log-log slope of y against x (both positive).
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_loglog needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

} // namespace weyllab
