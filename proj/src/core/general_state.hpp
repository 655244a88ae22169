#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ddm {

/// Largest register the dense pair loops accept (4^N work).
inline constexpr int kMaxDenseQubits = 12;

/// Probe state over the 2^N computational basis. Bit j of a basis index is
/// qubit j; a set bit is the excited state |1>.
class ProbeState {
public:
    struct Dense {
        int qubits;
        std::vector<std::complex<double>> amplitudes;
    };
    struct Ghz {
        int qubits;
    };

    /// Normalized to 1 within 1e-12; throws otherwise.
    static ProbeState dense(int qubits, std::vector<std::complex<double>> amplitudes);
    /// (|0...0> + |1...1>) / sqrt(2) for any N >= 1.
    static ProbeState ghz(int qubits);
    /// Uniform superposition |+>^N.
    static ProbeState product_plus(int qubits);
    /// Single basis state |x>.
    static ProbeState basis(int qubits, std::uint64_t index);

    int qubits() const noexcept;
    bool is_ghz() const noexcept { return std::holds_alternative<Ghz>(repr_); }
    const Dense* as_dense() const noexcept { return std::get_if<Dense>(&repr_); }

    /// Dense amplitude vector; GHZ states are expanded when N <= kMaxDenseQubits.
    std::vector<std::complex<double>> amplitudes() const;

private:
    explicit ProbeState(std::variant<Dense, Ghz> repr) : repr_(std::move(repr)) {}
    std::variant<Dense, Ghz> repr_;
};

/// Number of excited qubits c(x) in basis index x.
int excitation_count(std::uint64_t x, int qubits);

struct GeneratorMoments {
    double mean = 0.0;    // <h>
    double second = 0.0;  // <h^2>
    double kappa = 0.0;   // Σ (c(x)-c(y))^2 |a_x|^2 |a_y|^2
};

/// Moments of h = Σ_j σ_z,j; κ from the pair sum, so <h^2> - <h>^2 = 2κ is a
/// genuine identity check.
GeneratorMoments generator_moments(const ProbeState& state);

/// Σ |a_x|^2 |a_y|^2 cos((c(y) - c(x)) φ).
double probability_coherent(const ProbeState& state, double phi);

/// Σ |a_x|^2 |a_y|^2 cos((c(y) - c(x)) φ) exp(-2 c(x XOR y) α τ^6).
double probability_decohered(const ProbeState& state, double phi, double alpha_rate, double tau);

/// ξ = 2 α τ^6 Σ c(x XOR y) |a_x|^2 |a_y|^2, bounded by 2 α τ^6 N.
double decoherence_weight(const ProbeState& state, double alpha_rate, double tau);

/// sqrt(π² / (32 τ² l κ)); throws generator_insensitive for κ = 0.
double bound_coherent(const ProbeState& state, double tau, double repetitions);

/// sqrt((θ²κ/2 + 2αNτ⁶) / (l θ² κ² |dφ/dΔ|²)) with |dφ/dΔ| = 4τ/π.
double bound_decohered(const ProbeState& state, double tau, double repetitions, double alpha_rate,
                       double theta = 0.1);

/// Rows of (x, Re a_x, Im a_x); unlisted x are zero. Norm must be within 1e-8
/// of 1 and is then renormalized exactly.
ProbeState load_state_csv(const std::string& path, int qubits);

}  // namespace ddm
