#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace ddm {

// Reduced Boltzmann constant k_B / ħ in rad s^-1 K^-1.
inline constexpr double kBoltzmannOverHbar = 1.380649e-23 / 1.054571817e-34;

struct OhmicCutoff {
    double alpha;    // dimensionless coupling
    double omega_d;  // cutoff, rad/s
};

struct Lorentzian {
    double sigma;  // RMS amplitude, rad/s
    double tau_c;  // correlation time, s
};

struct GaussianSpectrum {
    double sigma;
    double tau_c;
};

/// Linearly interpolated density on a strictly increasing grid, zero outside.
struct Tabulated {
    std::vector<double> omega;
    std::vector<double> value;
};

/// Bath spectrum. OhmicCutoff and Tabulated act as quantum J(ω); Lorentzian,
/// GaussianSpectrum and Tabulated act as classical power spectra S(ω), the
/// Fourier transform of the noise autocorrelation g(t).
class NoiseSpectrum {
public:
    using Model = std::variant<OhmicCutoff, Lorentzian, GaussianSpectrum, Tabulated>;

    explicit NoiseSpectrum(Model model);

    static NoiseSpectrum ohmic(double alpha, double omega_d) { return NoiseSpectrum(OhmicCutoff{alpha, omega_d}); }
    static NoiseSpectrum lorentzian(double sigma, double tau_c) { return NoiseSpectrum(Lorentzian{sigma, tau_c}); }
    static NoiseSpectrum gaussian(double sigma, double tau_c) { return NoiseSpectrum(GaussianSpectrum{sigma, tau_c}); }
    static NoiseSpectrum tabulated(std::vector<double> omega, std::vector<double> value);

    const Model& model() const noexcept { return model_; }
    std::string name() const;

    bool is_ohmic() const noexcept { return std::holds_alternative<OhmicCutoff>(model_); }
    bool is_tabulated() const noexcept { return std::holds_alternative<Tabulated>(model_); }
    bool admits_quantum() const noexcept { return is_ohmic() || is_tabulated(); }
    bool admits_classical() const noexcept { return !is_ohmic(); }

    /// Correlation time for the built-in classical models, 0 otherwise.
    double correlation_time() const noexcept;

    /// Largest frequency with non-zero density (infinity for unbounded models).
    double support_end() const noexcept;

    /// Frequencies where the density has a kink or jump.
    std::vector<double> breakpoints() const;

    /// Exponent a of density ~ ω^a as ω -> 0; large when the density vanishes
    /// identically near zero.
    double low_frequency_exponent() const noexcept;

private:
    Model model_;
};

/// Spectral density at ω >= 0; negative ω throws a domain error.
double density(const NoiseSpectrum& spec, double omega);

/// Autocorrelation g(t) of the built-in classical models.
double autocorrelation(const NoiseSpectrum& spec, double t);

struct QuantumBath {
    double temperature;  // kelvin
};
struct ClassicalHighT {};
using BathKind = std::variant<QuantumBath, ClassicalHighT>;

/// coth(ħω / 2 k_B T) for a quantum bath, 1 at T = 0 and for the classical
/// limit. Returns +inf at ω = 0 with T > 0.
double thermal_kernel(const BathKind& kind, double omega);

/// Two-column CSV (ω, density); a non-numeric first line is taken as header.
NoiseSpectrum load_tabulated_csv(const std::string& path);

}  // namespace ddm
