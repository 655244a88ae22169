#include "decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"

namespace ddm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxInitialPanels = 2'000'000;

void check_qubits(int qubits) {
    if (qubits < 1) fail(Errc::invalid_argument, "qubit count must be >= 1");
}

int filter_low_order(int pulses) {
    if (pulses == 0) return 2;
    return pulses % 2 == 0 ? 6 : 4;
}

// Panels no wider than π/(2τ) on [lower, upper], plus the spectrum's own kinks.
std::vector<double> build_edges(double lower, double upper, double tau, const std::vector<double>& kinks) {
    const double width = kPi / (2.0 * tau);
    const double count = std::ceil((upper - lower) / width);
    if (count > static_cast<double>(kMaxInitialPanels))
        fail(Errc::integration_failure, "integration range spans too many filter oscillations");
    const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(count));
    std::vector<double> edges;
    edges.reserve(panels + 1 + kinks.size());
    for (std::size_t i = 0; i <= panels; ++i)
        edges.push_back(lower + (upper - lower) * static_cast<double>(i) / panels);
    for (double k : kinks)
        if (k > lower && k < upper) edges.push_back(k);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

ChiResult finish(const QuadratureResult& q, double extra_value, double extra_error, int qubits) {
    if (!q.converged || !std::isfinite(q.value))
        fail(Errc::integration_failure,
             "decoherence integral did not converge (estimate " + std::to_string(q.value) + " ± " +
                 std::to_string(q.abs_error) + ")");
    ChiResult out;
    out.chi = qubits * std::max(0.0, q.value + extra_value);
    out.abs_error = qubits * (q.abs_error + extra_error);
    out.evaluations = q.evaluations;
    return out;
}

}  // namespace

ChiResult chi_quantum(const NoiseSpectrum& spec, double temperature, const PulseSequence& seq, int qubits,
                      const ChiOptions& opt) {
    check_qubits(qubits);
    if (!spec.admits_quantum())
        fail(Errc::invalid_argument, "chi_quantum needs an ohmic or tabulated bath, got " + spec.name());
    if (!(temperature >= 0.0)) fail(Errc::invalid_argument, "temperature must be non-negative");

    const double low_order = filter_low_order(seq.pulses()) + spec.low_frequency_exponent() - 2.0 -
                             (temperature > 0.0 ? 1.0 : 0.0);
    if (low_order <= -1.0)
        fail(Errc::integration_failure,
             "decoherence integral diverges at omega -> 0 (integrand ~ omega^" + std::to_string(low_order) + ")");

    const double tau = seq.tau();
    const int n = seq.pulses();
    const BathKind bath = QuantumBath{temperature};
    auto integrand = [&](double omega) {
        if (omega <= 0.0) return 0.0;
        const double j = density(spec, omega);
        if (j == 0.0) return 0.0;
        return filter_value(omega * tau, n) * j / (4.0 * omega * omega) * thermal_kernel(bath, omega);
    };
    const auto edges = build_edges(0.0, spec.support_end(), tau, spec.breakpoints());
    const auto q = integrate_panels(integrand, edges, {opt.rel_tol, 0.0, opt.max_intervals});
    return finish(q, 0.0, 0.0, qubits);
}

ChiResult chi_classical(const NoiseSpectrum& spec, const PulseSequence& seq, int qubits, const ChiOptions& opt) {
    check_qubits(qubits);
    if (!spec.admits_classical())
        fail(Errc::invalid_argument, "chi_classical needs a lorentzian, gaussian or tabulated spectrum");

    const double tau = seq.tau();
    const int n = seq.pulses();
    auto weight = [&](double omega) { return 0.5 * density(spec, omega) / (kPi * omega * omega); };
    auto integrand = [&](double omega) {
        if (omega <= 0.0) return 0.0;
        const double w = weight(omega);
        return w == 0.0 ? 0.0 : filter_value(omega * tau, n) * w;
    };

    double upper = spec.support_end();
    const bool unbounded = !std::isfinite(upper);
    if (unbounded) upper = std::max(60.0 * std::max(n, 1) / tau, 20.0 / spec.correlation_time());

    // Octave edges around 1/τ_c keep a narrow spectral peak from hiding
    // between the nodes of a wide filter panel.
    auto kinks = spec.breakpoints();
    if (const double tc = spec.correlation_time(); tc > 0.0)
        for (int k = -8; k <= 6; ++k) kinks.push_back(std::ldexp(1.0, k) / tc);
    const QuadratureOptions qopt{opt.rel_tol, 0.0, opt.max_intervals};
    auto q = integrate_panels(integrand, build_edges(0.0, upper, tau, kinks), qopt);

    double tail = 0.0, tail_error = 0.0;
    if (unbounded) {
        // Past `upper` F is replaced by its period mean. F - mean has period
        // 2πn/τ in ω, so the error is at most π n max(F) w(upper)/τ; push
        // `upper` out until that is negligible.
        const double period_bound = kPi * std::max(n, 1) * filter_upper_bound(n) / tau;
        for (int i = 0; i < 12 && q.converged && period_bound * weight(upper) > 0.1 * opt.rel_tol * std::abs(q.value);
             ++i) {
            const auto more = integrate_panels(integrand, build_edges(upper, 2.0 * upper, tau, kinks), qopt);
            q.value += more.value;
            q.abs_error += more.abs_error;
            q.evaluations += more.evaluations;
            q.converged = q.converged && more.converged;
            upper *= 2.0;
        }
        // ∫_upper^∞ mean(F) w(ω) dω with ω = upper/u.
        const double mean = filter_mean(n);
        auto mapped = [&](double u) {
            if (u <= 0.0) return 0.0;
            const double omega = upper / u;
            return mean * weight(omega) * upper / (u * u);
        };
        const auto t = integrate(mapped, 0.0, 1.0, {1e-8, 0.0, 2000});
        tail = t.value;
        tail_error = t.abs_error + period_bound * weight(upper);
    }
    return finish(q, tail, tail_error, qubits);
}

double ohmic_tau6_rate(const OhmicCutoff& bath, int pulses) {
    if (pulses < 1) fail(Errc::invalid_argument, "tau^6 rate needs at least one pulse");
    // ∫_0^{ω_D} ω^4 · 2αω dω / (2 (4n)^4)
    return bath.alpha * std::pow(bath.omega_d, 6) / (6.0 * std::pow(4.0 * pulses, 4));
}

SmallTauChi chi_small_tau(const OhmicCutoff& bath, const PulseSequence& seq, int qubits) {
    check_qubits(qubits);
    const int n = seq.pulses();
    const double tau = seq.tau();
    SmallTauChi out;
    out.outside_regime = bath.omega_d * tau > 0.1;
    if (n == 0) {
        // F_0 ≈ z²/2 → ∫ J/8 dω
        out.tau_exponent = 2;
        out.prefactor = bath.alpha * bath.omega_d * bath.omega_d / 8.0;
    } else if (n % 2 == 1) {
        // F_n ≈ z⁴/(32 n⁴) → ∫ ω² J / (128 n⁴) dω
        out.tau_exponent = 4;
        out.prefactor = bath.alpha * std::pow(bath.omega_d, 4) / (256.0 * std::pow(n, 4));
    } else {
        out.tau_exponent = 6;
        out.prefactor = ohmic_tau6_rate(bath, n);
    }
    out.prefactor *= qubits;
    out.chi = out.prefactor * std::pow(tau, out.tau_exponent);
    return out;
}

PowerLawFit fit_power_law(std::span<const double> tau, std::span<const double> chi) {
    return fit_log_log(tau, chi, 5);
}

}  // namespace ddm
