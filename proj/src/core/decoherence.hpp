#pragma once

#include <cstddef>
#include <span>

#include "fitting.hpp"
#include "noise.hpp"
#include "pulse_filter.hpp"

namespace ddm {

struct ChiResult {
    double chi = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

struct ChiOptions {
    double rel_tol = 1e-10;
    std::size_t max_intervals = 200000;
};

/// χ_n = N ∫ F_n(ωτ) J(ω) / (4ω²) coth(ħω / 2k_B T) dω for an Ohmic or
/// tabulated bath. Throws integration_failure when the integral diverges or
/// the quadrature cannot meet its tolerance.
ChiResult chi_quantum(const NoiseSpectrum& spec, double temperature, const PulseSequence& seq, int qubits,
                      const ChiOptions& opt = {});

/// High-temperature limit χ_n = N ∫ F_n(ωτ) p(ω) / (πω²) dω with p = S/2, S
/// the classical power spectrum. Under this convention χ per qubit equals
/// Var(Φ)/4 for the accumulated toggling-frame phase Φ.
ChiResult chi_classical(const NoiseSpectrum& spec, const PulseSequence& seq, int qubits,
                        const ChiOptions& opt = {});

/// Leading small-τ term of χ for the Ohmic cutoff bath at T = 0.
struct SmallTauChi {
    double chi = 0.0;
    double prefactor = 0.0;  // χ = prefactor · τ^tau_exponent
    int tau_exponent = 0;    // 6 for even n >= 2, 4 for odd n, 2 for n = 0
    bool outside_regime = false;  // ω_D τ > 0.1
};

SmallTauChi chi_small_tau(const OhmicCutoff& bath, const PulseSequence& seq, int qubits);

/// Per-qubit small-τ rate α_eff with χ ≈ α_eff N τ^6 (even n >= 2).
double ohmic_tau6_rate(const OhmicCutoff& bath, int pulses);

/// Slope of log χ against log τ; needs >= 5 positive points.
PowerLawFit fit_power_law(std::span<const double> tau, std::span<const double> chi);

}  // namespace ddm
