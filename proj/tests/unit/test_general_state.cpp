#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "fitting.hpp"
#include "general_state.hpp"
#include "precision.hpp"

using namespace ddm;
using cd = std::complex<double>;

namespace {

ProbeState random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cd> a(std::size_t{1} << n);
    double norm = 0.0;
    for (auto& x : a) {
        x = {g(rng), g(rng)};
        norm += std::norm(x);
    }
    for (auto& x : a) x /= std::sqrt(norm);
    return ProbeState::dense(n, std::move(a));
}

// Equal branches at c = 0, N/2 and N (N even); κ = N²/3.
ProbeState cat_state(int n) {
    std::vector<cd> a(std::size_t{1} << n, 0.0);
    const double w = 1.0 / std::sqrt(3.0);
    a[0] = w;
    a[(std::size_t{1} << (n / 2)) - 1] = w;
    a[(std::size_t{1} << n) - 1] = w;
    return ProbeState::dense(n, std::move(a));
}

// <ψ|U|ψ> with U applying e^{-iφ} to |1> of each qubit in turn.
double brute_force_p(const ProbeState& state, double phi) {
    const auto psi = state.amplitudes();
    auto u = psi;
    const int n = state.qubits();
    for (int q = 0; q < n; ++q)
        for (std::size_t x = 0; x < u.size(); ++x)
            if ((x >> q) & 1) u[x] *= std::polar(1.0, -phi);
    cd overlap = 0.0;
    for (std::size_t x = 0; x < psi.size(); ++x) overlap += std::conj(psi[x]) * u[x];
    return std::norm(overlap);
}

}  // namespace

TEST_CASE("excitation count") {
    CHECK(excitation_count(0, 5) == 0);
    CHECK(excitation_count((1u << 7) - 1, 7) == 7);
    CHECK(excitation_count(0b1011, 4) == 3);
    CHECK_THROWS_AS(excitation_count(16, 4), Error);
}

TEST_CASE("state construction is validated") {
    CHECK_THROWS_AS(ProbeState::dense(2, {1.0, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(ProbeState::dense(1, {1.0, 1e-5}), Error);
    CHECK_THROWS_AS(ProbeState::dense(13, std::vector<cd>(std::size_t{1} << 13, 0.0)), Error);
    CHECK_THROWS_AS(ProbeState::ghz(0), Error);
    CHECK(ProbeState::ghz(1000).qubits() == 1000);
    CHECK_THROWS_AS(ProbeState::ghz(1000).amplitudes(), Error);
}

TEST_CASE("moments of reference states") {
    for (int n = 1; n <= 10; ++n) {
        const auto g = generator_moments(ProbeState::ghz(n));
        CHECK(g.mean == 0.0);
        CHECK(g.second == doctest::Approx(double(n * n)));
        CHECK(g.kappa == doctest::Approx(n * n / 2.0));
        const auto gd = generator_moments(ProbeState::dense(n, ProbeState::ghz(n).amplitudes()));
        CHECK(gd.kappa == doctest::Approx(g.kappa));
        CHECK(gd.second == doctest::Approx(g.second));

        const auto p = generator_moments(ProbeState::product_plus(n));
        CHECK(p.mean == doctest::Approx(0.0).scale(1.0));
        CHECK(p.second - p.mean * p.mean == doctest::Approx(double(n)));

        const auto b = generator_moments(ProbeState::basis(n, 0));
        CHECK(b.kappa == 0.0);
        CHECK(b.mean == doctest::Approx(-double(n)));
    }
}

TEST_CASE("variance equals twice kappa on random states") {
    std::mt19937_64 rng(2024);
    for (int n = 2; n <= 10; ++n) {
        for (int i = 0; i < 100; ++i) {
            const auto m = generator_moments(random_state(n, rng));
            const double var = m.second - m.mean * m.mean;
            CHECK(std::abs(var - 2.0 * m.kappa) <= 1e-10 * std::max(1.0, var));
            CHECK(m.second <= n * n + 1e-9);
        }
    }
}

TEST_CASE("coherent probability") {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 6; ++n) {
        const auto s = random_state(n, rng);
        CHECK(probability_coherent(s, 0.0) == doctest::Approx(1.0));
        for (double phi : {0.1, 0.77, 2.0, -1.3}) {
            CHECK(probability_coherent(s, phi) == doctest::Approx(probability_coherent(s, -phi)).epsilon(1e-12));
            CHECK(std::abs(probability_coherent(s, phi) - brute_force_p(s, phi)) <= 1e-12);
            CHECK(probability_coherent(ProbeState::ghz(n), phi) == doctest::Approx(0.5 + 0.5 * std::cos(n * phi)));
        }
    }
}

TEST_CASE("decohered probability") {
    std::mt19937_64 rng(9);
    for (int n = 1; n <= 6; ++n) {
        const auto s = random_state(n, rng);
        for (double phi : {0.0, 0.4, 1.9}) {
            CHECK(probability_decohered(s, phi, 0.0, 0.5) == doctest::Approx(probability_coherent(s, phi)).epsilon(1e-12));
            for (double rate : {1e-3, 0.1, 3.0}) {
                const double p = probability_decohered(s, phi, rate, 1.0);
                CHECK(p >= -1e-12);
                CHECK(p <= 1.0 + 1e-12);
            }
        }
        // ατ⁶ = 50: only x = y terms survive.
        const auto amps = s.amplitudes();
        double diag = 0.0;
        for (const auto& a : amps) diag += std::pow(std::norm(a), 2);
        CHECK(probability_decohered(s, 0.8, 50.0, 1.0) == doctest::Approx(diag).epsilon(1e-12));
    }
    CHECK_THROWS_AS(probability_decohered(ProbeState::ghz(2), 0.1, -1.0, 1.0), Error);
}

TEST_CASE("GHZ decohered probability matches the GHZ signal") {
    for (int n : {1, 3, 8}) {
        const auto closed = ProbeState::ghz(n);
        const auto dense = ProbeState::dense(n, closed.amplitudes());
        EnsembleConfig cfg;
        cfg.qubits = n;
        for (double phi : {0.0, 0.3, 1.1, 2.9}) {
            for (double rate : {0.0, 0.01, 0.2, 1.5}) {
                cfg.detuning = phi * std::numbers::pi / 4.0;  // φ = 4Δτ/π with τ = 1
                const double s = signal_ghz(cfg, n * rate, 1.0);
                CHECK(std::abs(probability_decohered(closed, phi, rate, 1.0) - (1.0 + s) / 2.0) <= 1e-12);
                CHECK(std::abs(probability_decohered(dense, phi, rate, 1.0) - (1.0 + s) / 2.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("decoherence contracts the GHZ fringe") {
    const auto s = ProbeState::ghz(5);
    double prev = 1.0;
    for (double rate = 0.0; rate < 2.0; rate += 0.1) {
        const double off = std::abs(probability_decohered(s, 0.3, rate, 1.0) - 0.5);
        CHECK(off <= prev);
        prev = off;
    }
}

TEST_CASE("decoherence weight") {
    CHECK(decoherence_weight(ProbeState::ghz(6), 0.5, 1.0) == doctest::Approx(6.0 * 0.5));
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 6; ++n)
        CHECK(decoherence_weight(random_state(n, rng), 0.5, 1.0) <= 2.0 * 0.5 * n + 1e-12);
}

TEST_CASE("coherent bound") {
    const double tau = 0.2, l = 1000.0;
    for (int n : {2, 8, 100})
        CHECK(bound_coherent(ProbeState::ghz(2 * n), tau, l) / bound_coherent(ProbeState::ghz(n), tau, l) ==
              doctest::Approx(0.5));
    const double kappa = generator_moments(ProbeState::ghz(4)).kappa;
    CHECK(bound_coherent(ProbeState::ghz(4), tau, l) ==
          doctest::Approx(std::sqrt(std::numbers::pi * std::numbers::pi / (32.0 * tau * tau * l * kappa))));
    CHECK(bound_coherent(ProbeState::product_plus(1), tau, l) > 0.0);
    try {
        bound_coherent(ProbeState::basis(3, 5), tau, l);
        FAIL("expected generator-insensitive error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::generator_insensitive);
    }
}

TEST_CASE("decohered bound reduces to the coherent one without noise") {
    for (int n : {2, 16, 512})
        CHECK(bound_decohered(ProbeState::ghz(n), 0.1, 100.0, 0.0) ==
              doctest::Approx(bound_coherent(ProbeState::ghz(n), 0.1, 100.0)).epsilon(1e-12));
    CHECK_THROWS_AS(bound_decohered(ProbeState::ghz(2), 0.1, 100.0, 1.0, 0.0), Error);
}

TEST_CASE("decohered bound scales as N^(-11/12) at the protected time") {
    const double alpha = 3.0, total = 1e3;
    auto bound_at = [&](const ProbeState& s) {
        const double tau = 0.1 * std::pow(alpha * s.qubits(), -1.0 / 6.0);
        return bound_decohered(s, tau, total / tau, alpha);
    };
    std::vector<double> ns, ghz, cat;
    for (int p = 1; p <= 10; ++p) {
        ns.push_back(1 << p);
        ghz.push_back(bound_at(ProbeState::ghz(1 << p)));
    }
    CHECK(std::abs(-fit_log_log(ns, ghz).exponent - 11.0 / 12.0) <= 0.02);

    std::vector<double> cn;
    for (int n = 2; n <= 12; n += 2) {
        const auto s = cat_state(n);
        CHECK(generator_moments(s).kappa == doctest::Approx(n * n / 3.0));
        cn.push_back(n);
        cat.push_back(bound_at(s));
    }
    CHECK(std::abs(-fit_log_log(cn, cat).exponent - 11.0 / 12.0) <= 0.02);
}

TEST_CASE("states load from CSV") {
    const auto path = (std::filesystem::temp_directory_path() / "ddm_state_test.csv").string();
    {
        std::ofstream out(path);
        out << "x,re,im\n0,0.7071067811865476,0\n3,0,0.7071067811865476\n";
    }
    const auto s = load_state_csv(path, 2);
    const auto a = s.amplitudes();
    CHECK(std::abs(a[3] - cd(0.0, std::sqrt(0.5))) < 1e-15);
    CHECK(a[1] == cd(0.0));
    CHECK(generator_moments(s).kappa == doctest::Approx(2.0));
    {
        std::ofstream out(path);
        out << "0,0.6,0\n1,0.6,0\n";
    }
    CHECK_THROWS_AS(load_state_csv(path, 1), Error);
    {
        std::ofstream out(path);
        out << "0,1,0\n4,0,0\n";
    }
    CHECK_THROWS_AS(load_state_csv(path, 2), Error);
    std::filesystem::remove(path);
}
