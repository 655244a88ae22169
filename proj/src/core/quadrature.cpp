#include "quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "error.hpp"

namespace ddm {
namespace {

// QUADPACK dqk15 abscissae and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_panels(const std::function<double(double)>& f, std::span<const double> edges,
                                  const QuadratureOptions& opt) {
    if (edges.size() < 2) fail(Errc::invalid_argument, "quadrature needs at least one panel");
    std::priority_queue<Panel> heap;
    QuadratureResult out;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i + 1] >= edges[i])) fail(Errc::invalid_argument, "quadrature panel edges must be non-decreasing");
        if (edges[i + 1] == edges[i]) continue;
        Panel p = gauss_kronrod(f, edges[i], edges[i + 1]);
        out.evaluations += 15;
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    while (!heap.empty()) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
        if (error <= target) {
            out.converged = true;
            break;
        }
        if (heap.size() >= opt.max_intervals) break;
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine precision
        heap.pop();
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    if (heap.empty()) out.converged = true;
    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = value;
    out.abs_error = error;
    if (!std::isfinite(value)) out.converged = false;
    if (!out.converged && error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) out.converged = true;
    return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt) {
    const double edges[2] = {a, b};
    return integrate_panels(f, edges, opt);
}

}  // namespace ddm
