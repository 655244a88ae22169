#pragma once

#include <complex>
#include <vector>

namespace ddm {

/// CPMG sequence with `pulses` π pulses over an interrogation time `tau`.
/// pulses == 0 is free evolution (Ramsey), pulses == 1 the spin echo.
class PulseSequence {
public:
    PulseSequence(int pulses, double tau);

    int pulses() const noexcept { return pulses_; }
    double tau() const noexcept { return tau_; }

    /// δ_m = (m - 1/2) τ / n for m = 1..n; empty for n = 0.
    std::vector<double> instants() const;

    /// Boundary-inclusive instants: {0, δ_1, ..., δ_n, τ}.
    std::vector<double> boundaries() const;

private:
    int pulses_;
    double tau_;
};

std::vector<double> pulse_instants(const PulseSequence& seq);

/// 1 + (-1)^{n+1} e^{iz} + 2 Σ_j (-1)^j e^{i z δ_j/τ}.
std::complex<double> filter_sum(double z, int pulses);

/// |y_n(z)|^2, the raw modulus of the pulse sum.
double filter_sum_squared(double z, int pulses);

/// Normalized filter F_n(z) = |y_n(z)|^2 / 2 evaluated from the sum.
double filter_from_sum(double z, int pulses);

/// Ratio between the raw pulse sum and the normalized filter.
inline constexpr double kFilterSumNormalization = 2.0;

/// Closed trigonometric form of F_n(z) for n >= 1:
///   8 sin^4(z/4n) {sin^2(z/2) for even n, cos^2(z/2) for odd n} / cos^2(z/2n).
/// Falls back to the pulse sum where |cos(z/2n)| < 1e-3.
double filter_closed_form(double z, int pulses);

/// Free-evolution filter F_0(z) = 2 sin^2(z/2).
double filter_ramsey(double z);

/// Dispatches to filter_ramsey for n == 0, filter_closed_form otherwise.
double filter_value(double z, int pulses);

/// Mean of F_n over one period in z (2n+1 for n >= 1, 1 for n = 0); used to
/// bound the oscillatory tail of χ integrals.
double filter_mean(int pulses);

/// Largest value |y_n|^2 / 2 can take: (2n+2)^2 / 2.
double filter_upper_bound(int pulses);

}  // namespace ddm
