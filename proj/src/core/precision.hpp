#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decoherence.hpp"
#include "noise.hpp"
#include "pulse_filter.hpp"

namespace ddm {

struct EnsembleConfig {
    int qubits = 1;
    double detuning = 0.0;     // Δ, rad/s
    double total_time = 1e3;   // T_t, s
    std::optional<double> gyromagnetic;  // γ, rad/(s·T); only for B <-> Δ
};

/// Field amplitude B for a detuning Δ = γB; needs cfg.gyromagnetic.
double field_from_detuning(const EnsembleConfig& cfg, double detuning);
double detuning_from_field(const EnsembleConfig& cfg, double field);

struct PrecisionPoint {
    double tau = 0.0;
    double signal = 0.0;
    double chi = 0.0;
    double delta_delta = 0.0;
};

/// Phase bias that maximizes the slope of the GHZ signal.
inline constexpr double kMaxSlopeBias = std::numbers::pi / 2.0;

/// φ = 4Δτ/π.
double phase_per_qubit(double detuning, double tau);
/// dφ/dΔ = 4τ/π.
double phase_slope(double tau);

/// s_n(τ) = cos(Nφ + bias) e^{-2χ}.
double signal_ghz(const EnsembleConfig& cfg, double chi, double tau, double bias = 0.0);

/// δΔ = sqrt(p(1-p)) / (|dp/dΔ| sqrt(l)) with p = (1 + s)/2 and l = T_t/τ,
/// evaluated at total phase Nφ + bias. Throws insensitive_operating_point
/// when the slope vanishes.
PrecisionPoint uncertainty_ghz(const EnsembleConfig& cfg, double tau, double chi,
                               double bias = kMaxSlopeBias);
PrecisionPoint uncertainty_ghz(const EnsembleConfig& cfg, const PulseSequence& seq, const ChiResult& chi,
                               double bias = kMaxSlopeBias);

/// N independent single-qubit interferometers: the N = 1 δΔ divided by sqrt(N).
PrecisionPoint uncertainty_separable(const EnsembleConfig& cfg, double tau, double chi_single,
                                     double bias = kMaxSlopeBias);

enum class Protocol { ghz, separable };

/// χ(τ) for the ensemble being optimized: the N-qubit χ for GHZ, the
/// single-qubit χ for the separable protocol.
using ChiOfTau = std::function<double(double tau)>;

struct TauSearch {
    double initial_tau = 0.0;  // starting point for bracketing; 0 picks T_t * 1e-3
    double rel_tol = 1e-7;     // golden-section tolerance on τ
    double bias = kMaxSlopeBias;
};

struct OptimalTau {
    double tau_star = 0.0;
    PrecisionPoint point;
};

/// Minimizes δΔ(τ) by a coarse log-grid scan followed by golden-section
/// search on log τ. Throws no_interior_minimum when the grid minimum sits on
/// the bracket edge.
OptimalTau optimal_tau(const EnsembleConfig& cfg, const ChiOfTau& chi, Protocol protocol, const TauSearch& search = {});

/// χ for `qubits` independent qubits as a function of τ.
using ChiModel = std::function<double(double tau, int qubits)>;

/// Decoherence model backed by chi_quantum / chi_classical.
ChiModel spectrum_chi_model(const NoiseSpectrum& spec, const BathKind& bath, int pulses, ChiOptions opt = {});

/// χ = a N τ^v.
ChiModel power_law_chi_model(double a, double v);

struct ScalingPoint {
    int qubits = 0;
    double tau_star = 0.0;
    double chi_star = 0.0;
    double delta_delta_star = 0.0;
    double local_exponent = 0.0;  // d log χ / d log τ at τ*
    std::string error;            // non-empty when this N failed
};

struct ScalingFit {
    double k = 0.0;  // δΔ* ∝ N^{-k}
    double stderr = 0.0;
    std::vector<ScalingPoint> points;
    double mean_local_exponent = 0.0;
    double predicted_k = 0.0;
    double enhancement_exponent = 0.0;    // k - 1/2
    double predicted_enhancement = 0.0;   // (v-1)/(2v) for GHZ
};

/// Optimal δΔ* for every N, then a log-log fit of δΔ* against N. Needs >= 6
/// N values spanning >= 2 decades; failed N are reported per point and the
/// fit uses the survivors (>= 6 required).
ScalingFit scaling_scan(const EnsembleConfig& tmpl, const ChiModel& model, Protocol protocol,
                        std::span<const int> qubit_list, const TauSearch& search = {});

/// Predicted k = (2v-1)/(2v) for χ ∝ N τ^v with entangled probes.
double predicted_ghz_exponent(double v);

}  // namespace ddm
