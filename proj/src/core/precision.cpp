#include "precision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "fitting.hpp"
#include "parallel.hpp"

namespace ddm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_operating(const EnsembleConfig& cfg, double tau, double chi) {
    if (cfg.qubits < 1) fail(Errc::invalid_argument, "qubit count must be >= 1");
    if (!(tau > 0.0) || !std::isfinite(tau)) fail(Errc::invalid_argument, "interrogation time must be positive");
    if (!(cfg.total_time >= tau))
        fail(Errc::invalid_argument, "total time must cover at least one repetition (T_t >= tau)");
    if (!(chi >= 0.0)) fail(Errc::invalid_argument, "chi must be non-negative");
}

// log δΔ, computed in log space so large χ does not overflow.
double log_uncertainty(int qubits, double detuning, double total_time, double tau, double chi, double bias) {
    const double theta = qubits * phase_per_qubit(detuning, tau) + bias;
    const double envelope = std::exp(-2.0 * chi);
    const double s = std::cos(theta) * envelope;
    const double variance = std::max(0.0, (1.0 - s * s) / 4.0);
    const double sin_theta = std::abs(std::sin(theta));
    if (sin_theta == 0.0 || variance == 0.0) return kInf;
    const double log_slope = std::log(0.5 * sin_theta * qubits * phase_slope(tau)) - 2.0 * chi;
    return 0.5 * std::log(variance) - log_slope - 0.5 * std::log(total_time / tau);
}

PrecisionPoint make_point(int qubits, double detuning, double total_time, double tau, double chi, double bias,
                          double scale) {
    const double log_dd = log_uncertainty(qubits, detuning, total_time, tau, chi, bias);
    if (!std::isfinite(log_dd))
        fail(Errc::insensitive_operating_point, "insensitive operating point: signal slope vanishes");
    PrecisionPoint p;
    p.tau = tau;
    p.chi = chi;
    p.signal = std::cos(qubits * phase_per_qubit(detuning, tau) + bias) * std::exp(-2.0 * chi);
    p.delta_delta = std::exp(log_dd) * scale;
    return p;
}

}  // namespace

double field_from_detuning(const EnsembleConfig& cfg, double detuning) {
    if (!cfg.gyromagnetic || *cfg.gyromagnetic == 0.0)
        fail(Errc::invalid_argument, "gyromagnetic ratio is required to convert between field and detuning");
    return detuning / *cfg.gyromagnetic;
}

double detuning_from_field(const EnsembleConfig& cfg, double field) {
    if (!cfg.gyromagnetic) fail(Errc::invalid_argument, "gyromagnetic ratio is required to convert between field and detuning");
    return *cfg.gyromagnetic * field;
}

double phase_per_qubit(double detuning, double tau) { return 4.0 * detuning * tau / kPi; }

double phase_slope(double tau) { return 4.0 * tau / kPi; }

double signal_ghz(const EnsembleConfig& cfg, double chi, double tau, double bias) {
    if (!(chi >= 0.0)) fail(Errc::invalid_argument, "chi must be non-negative");
    return std::cos(cfg.qubits * phase_per_qubit(cfg.detuning, tau) + bias) * std::exp(-2.0 * chi);
}

PrecisionPoint uncertainty_ghz(const EnsembleConfig& cfg, double tau, double chi, double bias) {
    check_operating(cfg, tau, chi);
    return make_point(cfg.qubits, cfg.detuning, cfg.total_time, tau, chi, bias, 1.0);
}

PrecisionPoint uncertainty_ghz(const EnsembleConfig& cfg, const PulseSequence& seq, const ChiResult& chi,
                               double bias) {
    return uncertainty_ghz(cfg, seq.tau(), chi.chi, bias);
}

PrecisionPoint uncertainty_separable(const EnsembleConfig& cfg, double tau, double chi_single, double bias) {
    check_operating(cfg, tau, chi_single);
    return make_point(1, cfg.detuning, cfg.total_time, tau, chi_single, bias, 1.0 / std::sqrt(double(cfg.qubits)));
}

OptimalTau optimal_tau(const EnsembleConfig& cfg, const ChiOfTau& chi, Protocol protocol, const TauSearch& search) {
    if (cfg.qubits < 1) fail(Errc::invalid_argument, "qubit count must be >= 1");
    if (!(cfg.total_time > 0.0)) fail(Errc::invalid_argument, "total time must be positive");
    const int probe_qubits = protocol == Protocol::ghz ? cfg.qubits : 1;
    auto objective = [&](double log_tau) {
        const double tau = std::exp(log_tau);
        const double c = chi(tau);
        if (!(c >= 0.0)) return kInf;
        return log_uncertainty(probe_qubits, cfg.detuning, cfg.total_time, tau, c, search.bias);
    };

    // Bracket between a nearly coherent τ and a strongly decohered one.
    const double start = search.initial_tau > 0.0 ? search.initial_tau : cfg.total_time * 1e-3;
    double lo = std::min(start, cfg.total_time);
    for (int i = 0; i < 400 && chi(lo) > 1e-4; ++i) lo /= 4.0;
    double hi = std::min(start, cfg.total_time);
    for (int i = 0; i < 400 && chi(hi) < 4.0 && hi < cfg.total_time; ++i) hi = std::min(hi * 4.0, cfg.total_time);
    if (!(hi > lo)) lo = hi * 1e-3;

    constexpr int kGrid = 81;
    const double a0 = std::log(lo), b0 = std::log(hi);
    int best = 0;
    double best_value = kInf;
    std::vector<double> grid(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        grid[i] = a0 + (b0 - a0) * i / (kGrid - 1);
        const double v = objective(grid[i]);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best == 0 || best == kGrid - 1 || !std::isfinite(best_value)) {
        std::ostringstream msg;
        msg << "no interior minimum of the uncertainty in tau in [" << lo << ", " << hi << "]: chi(lo) = " << chi(lo)
            << ", chi(hi) = " << chi(hi) << ", grid minimum at tau = " << std::exp(grid[best]);
        fail(Errc::no_interior_minimum, msg.str());
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = grid[best - 1], b = grid[best + 1];
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    const double tol = std::max(search.rel_tol, 1e-12);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double tau_star = std::exp(0.5 * (a + b));
    OptimalTau out;
    out.tau_star = tau_star;
    const double c_star = chi(tau_star);
    out.point = protocol == Protocol::ghz ? uncertainty_ghz(cfg, tau_star, c_star, search.bias)
                                          : uncertainty_separable(cfg, tau_star, c_star, search.bias);
    return out;
}

ChiModel spectrum_chi_model(const NoiseSpectrum& spec, const BathKind& bath, int pulses, ChiOptions opt) {
    if (std::holds_alternative<QuantumBath>(bath)) {
        const double temperature = std::get<QuantumBath>(bath).temperature;
        return [spec, temperature, pulses, opt](double tau, int qubits) {
            return chi_quantum(spec, temperature, PulseSequence(pulses, tau), qubits, opt).chi;
        };
    }
    return [spec, pulses, opt](double tau, int qubits) {
        return chi_classical(spec, PulseSequence(pulses, tau), qubits, opt).chi;
    };
}

ChiModel power_law_chi_model(double a, double v) {
    if (!(a > 0.0) || !(v > 0.0)) fail(Errc::invalid_argument, "power-law chi needs a > 0 and v > 0");
    return [a, v](double tau, int qubits) { return a * qubits * std::pow(tau, v); };
}

double predicted_ghz_exponent(double v) { return (2.0 * v - 1.0) / (2.0 * v); }

ScalingFit scaling_scan(const EnsembleConfig& tmpl, const ChiModel& model, Protocol protocol,
                        std::span<const int> qubit_list, const TauSearch& search) {
    if (qubit_list.size() < 6) fail(Errc::invalid_argument, "scaling scan needs at least 6 qubit counts");
    const auto [mn, mx] = std::minmax_element(qubit_list.begin(), qubit_list.end());
    if (*mn < 1) fail(Errc::invalid_argument, "qubit counts must be >= 1");
    if (double(*mx) / double(*mn) < 100.0) fail(Errc::invalid_argument, "qubit counts must span at least two decades");

    ScalingFit fit;
    fit.points.resize(qubit_list.size());
    parallel_for(qubit_list.size(), [&](std::size_t i) {
        ScalingPoint& pt = fit.points[i];
        pt.qubits = qubit_list[i];
        try {
            EnsembleConfig cfg = tmpl;
            cfg.qubits = pt.qubits;
            const int probe = protocol == Protocol::ghz ? pt.qubits : 1;
            auto chi = [&](double tau) { return model(tau, probe); };
            const OptimalTau opt = optimal_tau(cfg, chi, protocol, search);
            pt.tau_star = opt.tau_star;
            pt.chi_star = opt.point.chi;
            pt.delta_delta_star = opt.point.delta_delta;
            constexpr double h = 0.05;
            const double up = chi(opt.tau_star * std::exp(h));
            const double down = chi(opt.tau_star * std::exp(-h));
            pt.local_exponent = (up > 0.0 && down > 0.0) ? std::log(up / down) / (2.0 * h) : 0.0;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    });

    std::vector<double> ns, dds;
    double v_sum = 0.0;
    for (const auto& pt : fit.points) {
        if (!pt.error.empty()) continue;
        ns.push_back(pt.qubits);
        dds.push_back(pt.delta_delta_star);
        v_sum += pt.local_exponent;
    }
    if (ns.size() < 6) fail(Errc::fit_failure, "fewer than 6 qubit counts produced an optimum");
    const PowerLawFit law = fit_log_log(ns, dds, 6);
    fit.k = -law.exponent;
    fit.stderr = law.exponent_stderr;
    fit.mean_local_exponent = v_sum / ns.size();
    fit.enhancement_exponent = fit.k - 0.5;
    if (protocol == Protocol::ghz) {
        fit.predicted_k = predicted_ghz_exponent(fit.mean_local_exponent);
        fit.predicted_enhancement = (fit.mean_local_exponent - 1.0) / (2.0 * fit.mean_local_exponent);
    } else {
        fit.predicted_k = 0.5;
        fit.predicted_enhancement = 0.0;
    }
    return fit;
}

}  // namespace ddm
