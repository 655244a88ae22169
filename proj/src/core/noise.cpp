#include "noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace ddm {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        fail(Errc::invalid_argument, std::string(what) + " must be positive and finite");
}

bool parse_row(const std::string& line, double& a, double& b) {
    std::string s = line;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    if (!(in >> a >> b)) return false;
    std::string rest;
    return !(in >> rest);
}

}  // namespace

NoiseSpectrum::NoiseSpectrum(Model model) : model_(std::move(model)) {
    std::visit(overloaded{
                   [](const OhmicCutoff& m) {
                       require_positive(m.alpha, "coupling alpha");
                       require_positive(m.omega_d, "cutoff omega_D");
                   },
                   [](const Lorentzian& m) {
                       if (!(m.sigma >= 0.0)) fail(Errc::invalid_argument, "sigma must be non-negative");
                       require_positive(m.tau_c, "correlation time");
                   },
                   [](const GaussianSpectrum& m) {
                       if (!(m.sigma >= 0.0)) fail(Errc::invalid_argument, "sigma must be non-negative");
                       require_positive(m.tau_c, "correlation time");
                   },
                   [](const Tabulated& m) {
                       if (m.omega.size() != m.value.size() || m.omega.size() < 2)
                           fail(Errc::invalid_argument, "tabulated spectrum needs >= 2 matching (omega, value) pairs");
                       if (m.omega.front() < 0.0) fail(Errc::invalid_argument, "tabulated grid must start at omega >= 0");
                       for (std::size_t i = 0; i < m.omega.size(); ++i) {
                           if (!std::isfinite(m.omega[i]) || !std::isfinite(m.value[i]))
                               fail(Errc::invalid_argument, "tabulated spectrum has non-finite entries");
                           if (m.value[i] < 0.0) fail(Errc::invalid_argument, "tabulated density must be non-negative");
                           if (i > 0 && !(m.omega[i] > m.omega[i - 1]))
                               fail(Errc::invalid_argument, "tabulated grid must be strictly increasing");
                       }
                   },
               },
               model_);
}

NoiseSpectrum NoiseSpectrum::tabulated(std::vector<double> omega, std::vector<double> value) {
    return NoiseSpectrum(Tabulated{std::move(omega), std::move(value)});
}

std::string NoiseSpectrum::name() const {
    return std::visit(overloaded{
                          [](const OhmicCutoff&) { return std::string("ohmic"); },
                          [](const Lorentzian&) { return std::string("lorentzian"); },
                          [](const GaussianSpectrum&) { return std::string("gaussian"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      model_);
}

double NoiseSpectrum::correlation_time() const noexcept {
    if (auto* l = std::get_if<Lorentzian>(&model_)) return l->tau_c;
    if (auto* g = std::get_if<GaussianSpectrum>(&model_)) return g->tau_c;
    return 0.0;
}

double NoiseSpectrum::support_end() const noexcept {
    if (auto* o = std::get_if<OhmicCutoff>(&model_)) return o->omega_d;
    if (auto* t = std::get_if<Tabulated>(&model_)) return t->omega.back();
    return std::numeric_limits<double>::infinity();
}

std::vector<double> NoiseSpectrum::breakpoints() const {
    if (auto* o = std::get_if<OhmicCutoff>(&model_)) return {o->omega_d};
    if (auto* t = std::get_if<Tabulated>(&model_)) return t->omega;
    return {};
}

double NoiseSpectrum::low_frequency_exponent() const noexcept {
    if (is_ohmic()) return 1.0;
    if (auto* t = std::get_if<Tabulated>(&model_)) {
        if (t->omega.front() > 0.0) return std::numeric_limits<double>::infinity();
        return t->value.front() > 0.0 ? 0.0 : 1.0;
    }
    return 0.0;
}

double density(const NoiseSpectrum& spec, double omega) {
    if (!(omega >= 0.0)) fail(Errc::domain, "spectral density requires omega >= 0");
    return std::visit(
        overloaded{
            [&](const OhmicCutoff& m) { return omega < m.omega_d ? 2.0 * m.alpha * omega : 0.0; },
            [&](const Lorentzian& m) {
                const double x = omega * m.tau_c;
                return 2.0 * m.sigma * m.sigma * m.tau_c / (1.0 + x * x);
            },
            [&](const GaussianSpectrum& m) {
                const double x = omega * m.tau_c;
                return m.sigma * m.sigma * m.tau_c * std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * x * x);
            },
            [&](const Tabulated& m) {
                if (omega < m.omega.front() || omega > m.omega.back()) return 0.0;
                auto hi = std::upper_bound(m.omega.begin(), m.omega.end(), omega);
                if (hi == m.omega.end()) return m.value.back();
                const auto i = static_cast<std::size_t>(hi - m.omega.begin());
                const double w = (omega - m.omega[i - 1]) / (m.omega[i] - m.omega[i - 1]);
                return m.value[i - 1] + w * (m.value[i] - m.value[i - 1]);
            },
        },
        spec.model());
}

double autocorrelation(const NoiseSpectrum& spec, double t) {
    if (auto* l = std::get_if<Lorentzian>(&spec.model())) return l->sigma * l->sigma * std::exp(-std::abs(t) / l->tau_c);
    if (auto* g = std::get_if<GaussianSpectrum>(&spec.model())) {
        const double x = t / g->tau_c;
        return g->sigma * g->sigma * std::exp(-0.5 * x * x);
    }
    fail(Errc::invalid_argument, "autocorrelation is defined for lorentzian and gaussian spectra only");
}

double thermal_kernel(const BathKind& kind, double omega) {
    if (std::holds_alternative<ClassicalHighT>(kind)) return 1.0;
    const double temperature = std::get<QuantumBath>(kind).temperature;
    if (!(temperature >= 0.0)) fail(Errc::invalid_argument, "temperature must be non-negative");
    if (temperature == 0.0) return 1.0;
    if (omega == 0.0) return std::numeric_limits<double>::infinity();
    const double x = omega / (2.0 * kBoltzmannOverHbar * temperature);
    if (x > 20.0) return 1.0 + 2.0 * std::exp(-2.0 * x) / (1.0 - std::exp(-2.0 * x));
    return 1.0 / std::tanh(x);
}

NoiseSpectrum load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open spectrum file: " + path);
    std::vector<double> omega, value;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        double a = 0, b = 0;
        if (!parse_row(line, a, b)) {
            if (omega.empty() && lineno == 1) continue;  // header
            fail(Errc::io, path + ":" + std::to_string(lineno) + ": expected two numeric columns");
        }
        omega.push_back(a);
        value.push_back(b);
    }
    return NoiseSpectrum::tabulated(std::move(omega), std::move(value));
}

}  // namespace ddm
