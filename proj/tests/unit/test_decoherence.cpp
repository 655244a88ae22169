#include <cmath>
#include <functional>
#include <vector>

#include "decoherence.hpp"
#include "doctest.h"
#include "error.hpp"
#include "oracle_values.hpp"

using namespace ddm;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return g;
}

double fitted_exponent(const std::function<double(double)>& chi, double lo, double hi) {
    const auto taus = log_grid(lo, hi, 9);
    std::vector<double> vals;
    for (double t : taus) vals.push_back(chi(t));
    return fit_power_law(taus, vals).exponent;
}

}  // namespace

TEST_CASE("classical chi matches time-domain double integrals") {
    for (const auto& c : oracle::kClassical) {
        const auto spec = c.gaussian ? NoiseSpectrum::gaussian(c.sigma, c.tau_c) : NoiseSpectrum::lorentzian(c.sigma, c.tau_c);
        const auto r = chi_classical(spec, PulseSequence(c.n, c.tau), 1);
        CAPTURE(c.gaussian);
        CAPTURE(c.n);
        CAPTURE(c.tau);
        CHECK(r.chi == doctest::Approx(c.chi).epsilon(2e-6));
        CHECK(r.abs_error >= 0.0);
        CHECK(r.evaluations > 0);
    }
}

TEST_CASE("lorentzian free decay has the OU closed form") {
    const double sigma = 0.9, tc = 2.0;
    const auto spec = NoiseSpectrum::lorentzian(sigma, tc);
    for (double tau : {0.01, 0.1, 1.0, 10.0}) {
        const double x = tau / tc;
        const double exact = sigma * sigma * tc * tc * (std::expm1(-x) + x) / 2.0;
        CHECK(chi_classical(spec, PulseSequence(0, tau), 1).chi == doctest::Approx(exact).epsilon(1e-8));
    }
    // Quasi-static limit: σ²τ²/4 per qubit.
    const double tau = 1e-4 * tc;
    CHECK(chi_classical(spec, PulseSequence(0, tau), 3).chi == doctest::Approx(3 * sigma * sigma * tau * tau / 4).epsilon(1e-4));
}

TEST_CASE("quantum chi matches mpmath quadrature") {
    for (const auto& c : oracle::kQuantum) {
        const auto spec = NoiseSpectrum::ohmic(c.alpha, c.omega_d);
        CAPTURE(c.temperature);
        CAPTURE(c.n);
        CAPTURE(c.tau);
        CHECK(chi_quantum(spec, c.temperature, PulseSequence(c.n, c.tau), 1).chi ==
              doctest::Approx(c.chi).epsilon(1e-8));
    }
}

TEST_CASE("chi is exactly linear in N") {
    const auto ohm = NoiseSpectrum::ohmic(0.1, 1.0);
    const auto lor = NoiseSpectrum::lorentzian(1.0, 1.0);
    for (int n : {0, 1, 2, 5}) {
        const PulseSequence seq(n, 0.7);
        const double q1 = chi_quantum(ohm, 0.0, seq, 1).chi;
        const double c1 = chi_classical(lor, seq, 1).chi;
        for (int N : {2, 7, 1000}) {
            CHECK(chi_quantum(ohm, 0.0, seq, N).chi == N * q1);
            CHECK(chi_classical(lor, seq, N).chi == N * c1);
        }
    }
}

TEST_CASE("quantum chi vanishes as tau goes to zero and grows monotonically") {
    const auto spec = NoiseSpectrum::ohmic(0.1, 1.0);
    for (int n : {1, 2, 4}) {
        double prev = 0.0;
        for (double tau : log_grid(1e-3, 1e-1, 15)) {
            const double chi = chi_quantum(spec, 0.0, PulseSequence(n, tau), 1).chi;
            CHECK(chi > prev);
            prev = chi;
        }
        CHECK(chi_quantum(spec, 0.0, PulseSequence(n, 1e-6), 1).chi < 1e-20);
    }
}

TEST_CASE("small-tau law matches quadrature") {
    const OhmicCutoff bath{0.1, 1.0};
    const auto spec = NoiseSpectrum(bath);
    for (int n : {1, 2, 3, 4, 8}) {
        for (double x : {1e-2, 1e-3}) {
            const auto approx = chi_small_tau(bath, PulseSequence(n, x), 1);
            const double exact = chi_quantum(spec, 0.0, PulseSequence(n, x), 1).chi;
            CAPTURE(n);
            CAPTURE(x);
            CHECK(approx.tau_exponent == (n % 2 == 0 ? 6 : 4));
            CHECK(!approx.outside_regime);
            CHECK(std::abs(approx.chi / exact - 1.0) <= (x == 1e-2 ? 1e-2 : 1e-4));
        }
    }
    CHECK(chi_small_tau(bath, PulseSequence(2, 0.01), 1).chi == doctest::Approx(0.1 / (6.0 * 4096.0) * 1e-12));
    CHECK(ohmic_tau6_rate(bath, 2) / ohmic_tau6_rate(bath, 4) == doctest::Approx(16.0));
    CHECK(chi_small_tau(bath, PulseSequence(2, 0.5), 1).outside_regime);
    const auto ramsey = chi_small_tau(bath, PulseSequence(0, 1e-3), 1);
    CHECK(ramsey.tau_exponent == 2);
    CHECK(ramsey.chi / chi_quantum(spec, 0.0, PulseSequence(0, 1e-3), 1).chi == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("higher temperature never reduces quantum chi") {
    const auto spec = NoiseSpectrum::ohmic(0.1, 1.0);
    const std::vector<double> temps = {0.0, 1e-13, 1e-12, 1e-11, 1e-10};
    for (int n : {0, 1, 2}) {
        for (double tau : {0.05, 1.0, 8.0}) {
            double prev = 0.0;
            for (double T : temps) {
                const double chi = chi_quantum(spec, T, PulseSequence(n, tau), 1).chi;
                CHECK(chi >= prev);
                prev = chi;
            }
        }
    }
}

TEST_CASE("tighter tolerance stays within the reported error") {
    const auto ohm = NoiseSpectrum::ohmic(0.1, 1.0);
    const auto lor = NoiseSpectrum::lorentzian(1.0, 1.0);
    const auto gau = NoiseSpectrum::gaussian(1.0, 1.0);
    for (int n : {0, 1, 2, 4}) {
        for (double tau : {0.03, 1.0, 20.0}) {
            const PulseSequence seq(n, tau);
            const ChiOptions loose{1e-6, 200000}, tight{5e-13, 400000};
            const auto a = chi_quantum(ohm, 0.0, seq, 1, loose);
            const auto b = chi_quantum(ohm, 0.0, seq, 1, tight);
            CHECK(std::abs(a.chi - b.chi) <= a.abs_error + 1e-300);
            for (const auto* s : {&lor, &gau}) {
                const auto c = chi_classical(*s, seq, 1, loose);
                const auto d = chi_classical(*s, seq, 1, tight);
                CAPTURE(n);
                CAPTURE(tau);
                CHECK(std::abs(c.chi - d.chi) <= c.abs_error + 1e-300);
            }
        }
    }
}

TEST_CASE("exponents of chi in the motional-narrowing regime") {
    const auto lor = NoiseSpectrum::lorentzian(1.0, 1.0);
    const auto gau = NoiseSpectrum::gaussian(1.0, 1.0);
    const double expected_lor[] = {2, 3, 3};
    const double expected_gau[] = {2, 4, 6};
    for (int n = 0; n <= 2; ++n) {
        auto cl = [&](double t) { return chi_classical(lor, PulseSequence(n, t), 1).chi; };
        auto cg = [&](double t) { return chi_classical(gau, PulseSequence(n, t), 1).chi; };
        CHECK(fitted_exponent(cl, 1e-4, 1e-2) == doctest::Approx(expected_lor[n]).epsilon(0.1 / expected_lor[n]));
        CHECK(fitted_exponent(cg, 1e-4, 1e-2) == doctest::Approx(expected_gau[n]).epsilon(0.1 / expected_gau[n]));
    }
    auto g1 = [&](double t) { return chi_classical(gau, PulseSequence(1, t), 1).chi; };
    CHECK(std::abs(fitted_exponent(g1, 1e-3, 1e-2) - 4.0) < 0.05);
    const auto ohm = NoiseSpectrum::ohmic(0.1, 1.0);
    auto q2 = [&](double t) { return chi_quantum(ohm, 0.0, PulseSequence(2, t), 1).chi; };
    CHECK(std::abs(fitted_exponent(q2, 1e-3, 1e-2) - 6.0) < 0.05);
}

TEST_CASE("power-law fit of an exact power law") {
    std::vector<double> t = {1, 2, 3, 4, 5}, c;
    for (double x : t) c.push_back(2.0 * x * x * x);
    const auto fit = fit_power_law(t, c);
    CHECK(std::abs(fit.exponent - 3.0) < 1e-9);
    CHECK(fit.prefactor == doctest::Approx(2.0));
    CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4}), Error);
    c[2] = 0.0;
    CHECK_THROWS_AS(fit_power_law(t, c), Error);
}

TEST_CASE("bath and spectrum mismatches are rejected") {
    const PulseSequence seq(1, 1.0);
    CHECK_THROWS_AS(chi_quantum(NoiseSpectrum::lorentzian(1, 1), 0.0, seq, 1), Error);
    CHECK_THROWS_AS(chi_classical(NoiseSpectrum::ohmic(0.1, 1), seq, 1), Error);
    CHECK_THROWS_AS(chi_quantum(NoiseSpectrum::ohmic(0.1, 1), -1.0, seq, 1), Error);
    CHECK_THROWS_AS(chi_quantum(NoiseSpectrum::ohmic(0.1, 1), 0.0, seq, 0), Error);
}

TEST_CASE("divergent integrals are reported, not returned as NaN") {
    // Flat J(ω) at ω -> 0 with T > 0 and free evolution: integrand ~ 1/ω.
    const auto flat = NoiseSpectrum::tabulated({0.0, 1.0}, {1.0, 1.0});
    try {
        chi_quantum(flat, 1.0, PulseSequence(0, 1.0), 1);
        FAIL("expected an integration failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::integration_failure);
    }
    CHECK(std::isfinite(chi_quantum(flat, 0.0, PulseSequence(0, 1.0), 1).chi));
    CHECK(std::isfinite(chi_quantum(flat, 1.0, PulseSequence(1, 1.0), 1).chi));
}

TEST_CASE("tabulated spectra reproduce the built-in models") {
    // Ramp J = 0.2 ω on [0, 1], the ohmic density up to its cutoff.
    const auto tab = NoiseSpectrum::tabulated({0.0, 1.0, 1.0 + 1e-12}, {0.0, 0.2, 0.0});
    const auto ohm = NoiseSpectrum::ohmic(0.1, 1.0);
    for (int n : {0, 1, 2}) {
        const PulseSequence seq(n, 2.0);
        CHECK(chi_quantum(tab, 0.0, seq, 1).chi == doctest::Approx(chi_quantum(ohm, 0.0, seq, 1).chi).epsilon(1e-8));
    }
}
