#include "fitting.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace ddm {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(Errc::invalid_argument, "fit needs equally sized inputs");
    const std::size_t n = x.size();
    if (n < 2) fail(Errc::fit_failure, "fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) fail(Errc::fit_failure, "fit abscissae are degenerate");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += r * r;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
    }
    fit.slope_stderr = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

PowerLawFit fit_log_log(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
    if (x.size() != y.size()) fail(Errc::invalid_argument, "fit needs equally sized inputs");
    if (x.size() < min_points)
        fail(Errc::fit_failure, "power-law fit needs at least " + std::to_string(min_points) + " points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
            fail(Errc::fit_failure, "power-law fit needs strictly positive finite data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const LinearFit line = fit_line(lx, ly);
    return {line.slope, std::exp(line.intercept), line.slope_stderr, line.max_abs_residual};
}

}  // namespace ddm
