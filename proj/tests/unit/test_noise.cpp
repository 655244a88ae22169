#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "error.hpp"
#include "noise.hpp"
#include "oracle_values.hpp"
#include "quadrature.hpp"

using namespace ddm;
using std::numbers::pi;

TEST_CASE("ohmic density is 2 alpha omega below the cutoff") {
    const auto s = NoiseSpectrum::ohmic(0.1, 1e6);
    CHECK(density(s, 1e5) == doctest::Approx(2e4));
    CHECK(density(s, 1e6) == 0.0);
    CHECK(density(s, 2e6) == 0.0);
    CHECK(density(s, 0.0) == 0.0);
    CHECK_THROWS_AS(density(s, -1.0), Error);
}

TEST_CASE("classical spectra values") {
    CHECK(density(NoiseSpectrum::lorentzian(1.0, 1.0), 0.0) == doctest::Approx(2.0));
    CHECK(density(NoiseSpectrum::gaussian(1.0, 1.0), 0.0) == doctest::Approx(std::sqrt(2.0 * pi)));
    const auto lor = NoiseSpectrum::lorentzian(2.0, 0.5);
    const auto gau = NoiseSpectrum::gaussian(2.0, 0.5);
    CHECK(density(gau, 10.0 / 0.5) / density(lor, 10.0 / 0.5) < 1e-6);
    const double w = 1e4 / 0.5;
    CHECK(density(lor, w) * w * w * 0.5 == doctest::Approx(2.0 * 4.0).epsilon(1e-6));
}

TEST_CASE("classical spectra integrate to the process variance") {
    for (double sigma : {0.5, 1.0, 3.0}) {
        for (double tc : {0.1, 1.0, 7.0}) {
            for (const auto& s : {NoiseSpectrum::lorentzian(sigma, tc), NoiseSpectrum::gaussian(sigma, tc)}) {
                auto f = [&](double u) {
                    // ω = u/(1-u) maps [0, 1) onto [0, ∞).
                    if (u >= 1.0) return 0.0;
                    const double w = u / (1.0 - u);
                    return density(s, w) / ((1.0 - u) * (1.0 - u));
                };
                const auto q = integrate(f, 0.0, 1.0, {1e-12, 0.0, 100000});
                CHECK(q.value / pi == doctest::Approx(sigma * sigma).epsilon(1e-3));
                CHECK(autocorrelation(s, 0.0) == doctest::Approx(sigma * sigma));
            }
        }
    }
}

TEST_CASE("autocorrelation shapes") {
    const auto lor = NoiseSpectrum::lorentzian(2.0, 0.5);
    const auto gau = NoiseSpectrum::gaussian(2.0, 0.5);
    CHECK(autocorrelation(lor, 0.5) == doctest::Approx(4.0 / std::exp(1.0)));
    CHECK(autocorrelation(gau, 1.0) == doctest::Approx(4.0 * std::exp(-2.0)));
    CHECK(autocorrelation(lor, -0.5) == autocorrelation(lor, 0.5));
}

TEST_CASE("spectrum parameters are validated") {
    CHECK_THROWS_AS(NoiseSpectrum::ohmic(-0.1, 1.0), Error);
    CHECK_THROWS_AS(NoiseSpectrum::ohmic(0.1, 0.0), Error);
    CHECK_THROWS_AS(NoiseSpectrum::lorentzian(1.0, 0.0), Error);
    CHECK_THROWS_AS(NoiseSpectrum::gaussian(-1.0, 1.0), Error);
    CHECK_THROWS_AS(NoiseSpectrum::tabulated({0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), Error);
    CHECK_THROWS_AS(NoiseSpectrum::tabulated({0.0, 1.0}, {1.0, -1.0}), Error);
    CHECK_THROWS_AS(NoiseSpectrum::tabulated({0.0, 1.0}, {1.0}), Error);
}

TEST_CASE("tabulated spectra interpolate linearly and vanish outside the grid") {
    const auto s = NoiseSpectrum::tabulated({1.0, 2.0, 4.0}, {0.0, 2.0, 6.0});
    CHECK(density(s, 0.5) == 0.0);
    CHECK(density(s, 1.5) == doctest::Approx(1.0));
    CHECK(density(s, 3.0) == doctest::Approx(4.0));
    CHECK(density(s, 4.0) == doctest::Approx(6.0));
    CHECK(density(s, 4.5) == 0.0);
    CHECK(s.support_end() == 4.0);
}

TEST_CASE("tabulated spectra load from CSV") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "ddm_spectrum_test.csv").string();
    {
        std::ofstream out(path);
        out << "omega,J\n0,0\n1,2\n2 4\n";
    }
    const auto s = load_tabulated_csv(path);
    CHECK(density(s, 1.5) == doctest::Approx(3.0));
    {
        std::ofstream out(path);
        out << "0,0\n2,1\n1,3\n";
    }
    CHECK_THROWS_AS(load_tabulated_csv(path), Error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_tabulated_csv(path), Error);
}

TEST_CASE("thermal kernel") {
    CHECK(thermal_kernel(QuantumBath{0.0}, 1e9) == 1.0);
    CHECK(thermal_kernel(ClassicalHighT{}, 1e9) == 1.0);
    CHECK(std::isinf(thermal_kernel(QuantumBath{1.0}, 0.0)));
    for (const auto& c : oracle::kKernel)
        CHECK(thermal_kernel(QuantumBath{c.temperature}, c.omega) == doctest::Approx(c.value).epsilon(1e-12));

    const double T = 2.0;
    const double kt = kBoltzmannOverHbar * T;  // k_B T / ħ in rad/s
    const double small = 2e-4 * kt;            // ħω / 2k_BT = 1e-4
    CHECK(thermal_kernel(QuantumBath{T}, small) == doctest::Approx(2.0 * kt / small).epsilon(1e-4));
    const double large = 30.0 * kt;
    CHECK(thermal_kernel(QuantumBath{T}, large) - 1.0 ==
          doctest::Approx(2.0 * std::exp(-30.0)).epsilon(1e-6));

    double prev = std::numeric_limits<double>::infinity();
    for (double w = 1e-3 * kt; w < 100.0 * kt; w *= 1.3) {
        const double v = thermal_kernel(QuantumBath{T}, w);
        CHECK(v <= prev);
        CHECK(v >= 1.0);
        prev = v;
    }
}
