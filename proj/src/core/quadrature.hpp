#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ddm {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_intervals = 200000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod integration over the panels
/// [edges[i], edges[i+1]]. The panel with the largest error estimate is
/// bisected until the summed estimate meets max(abs_tol, rel_tol |value|).
QuadratureResult integrate_panels(const std::function<double(double)>& f, std::span<const double> edges,
                                  const QuadratureOptions& opt = {});

/// Single-interval convenience wrapper.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt = {});

}  // namespace ddm
