#include "pulse_filter.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace ddm {

PulseSequence::PulseSequence(int pulses, double tau) : pulses_(pulses), tau_(tau) {
    if (pulses < 0) fail(Errc::invalid_argument, "pulse count must be non-negative");
    if (!(tau > 0.0) || !std::isfinite(tau))
        fail(Errc::invalid_argument, "interrogation time must be positive, got " + std::to_string(tau));
}

std::vector<double> PulseSequence::instants() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(pulses_));
    for (int m = 1; m <= pulses_; ++m) out.push_back((m - 0.5) * tau_ / pulses_);
    return out;
}

std::vector<double> PulseSequence::boundaries() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(pulses_) + 2);
    out.push_back(0.0);
    for (double d : instants()) out.push_back(d);
    out.push_back(tau_);
    return out;
}

std::vector<double> pulse_instants(const PulseSequence& seq) { return seq.instants(); }

std::complex<double> filter_sum(double z, int pulses) {
    if (pulses < 0) fail(Errc::invalid_argument, "pulse count must be non-negative");
    const double end_sign = (pulses % 2 == 0) ? -1.0 : 1.0;
    std::complex<double> y = 1.0 + end_sign * std::polar(1.0, z);
    for (int j = 1; j <= pulses; ++j) {
        const double sign = (j % 2 == 0) ? 2.0 : -2.0;
        y += sign * std::polar(1.0, z * (j - 0.5) / pulses);
    }
    return y;
}

double filter_sum_squared(double z, int pulses) { return std::norm(filter_sum(z, pulses)); }

double filter_from_sum(double z, int pulses) {
    return filter_sum_squared(z, pulses) / kFilterSumNormalization;
}

double filter_closed_form(double z, int pulses) {
    if (pulses < 1) fail(Errc::invalid_argument, "closed-form filter needs at least one pulse");
    const double n = pulses;
    const double c = std::cos(z / (2.0 * n));
    if (std::abs(c) < 1e-3) return filter_from_sum(z, pulses);
    const double s4 = std::pow(std::sin(z / (4.0 * n)), 4);
    const double half = (pulses % 2 == 0) ? std::sin(z / 2.0) : std::cos(z / 2.0);
    return 8.0 * s4 * half * half / (c * c);
}

double filter_ramsey(double z) {
    const double s = std::sin(z / 2.0);
    return 2.0 * s * s;
}

double filter_value(double z, int pulses) {
    return pulses == 0 ? filter_ramsey(z) : filter_closed_form(z, pulses);
}

double filter_mean(int pulses) { return pulses == 0 ? 1.0 : 2.0 * pulses + 1.0; }

double filter_upper_bound(int pulses) {
    const double terms = 2.0 * pulses + 2.0;
    return terms * terms / kFilterSumNormalization;
}

}  // namespace ddm
