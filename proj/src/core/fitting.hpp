#pragma once

#include <span>

namespace ddm {

/// Ordinary least squares of y against x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_abs_residual = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log y = log prefactor + exponent · log x; all values must be positive.
struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double exponent_stderr = 0.0;
    double max_log_residual = 0.0;
};

PowerLawFit fit_log_log(std::span<const double> x, std::span<const double> y, std::size_t min_points = 2);

}  // namespace ddm
