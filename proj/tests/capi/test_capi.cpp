#include <ddmetrics/ddmetrics.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"

extern "C" int ddm_c_header_check(void);

namespace {

struct Spectrum {
    ddm_spectrum* p = nullptr;
    ~Spectrum() { ddm_spectrum_free(p); }
};
struct Model {
    ddm_chi_model* p = nullptr;
    ~Model() { ddm_chi_model_free(p); }
};
struct State {
    ddm_state* p = nullptr;
    ~State() { ddm_state_free(p); }
};
struct Scan {
    ddm_scaling* p = nullptr;
    ~Scan() { ddm_scaling_free(p); }
};

double flaky_chi(double tau, int qubits, void* user) {
    if (qubits == *static_cast<int*>(user)) return -1.0;
    return 1e-4 * qubits * std::pow(tau, 4.0);
}

}  // namespace

TEST_CASE("header compiles as C") { CHECK(ddm_c_header_check() == 0); }

TEST_CASE("status reporting") {
    CHECK(std::string(ddm_status_name(DDM_OK)) == "ok");
    CHECK(std::strlen(ddm_version()) > 0);
    double f = 0.0;
    CHECK(ddm_filter(1.0, -1, &f) == DDM_E_INVALID_ARGUMENT);
    CHECK(std::strlen(ddm_last_error()) > 0);
    CHECK(ddm_filter(1.0, 1, nullptr) == DDM_E_INVALID_ARGUMENT);
    CHECK(ddm_filter(std::acos(-1.0), 1, &f) == DDM_OK);
    CHECK(f == doctest::Approx(2.0));
    double sq = 0.0;
    CHECK(ddm_filter_sum_squared(0.7, 3, &sq) == DDM_OK);
    CHECK(ddm_filter(0.7, 3, &f) == DDM_OK);
    CHECK(f == doctest::Approx(sq / 2.0));
}

TEST_CASE("pulse instants") {
    double t[4];
    CHECK(ddm_pulse_instants(4, 2.0, t, 4) == DDM_OK);
    CHECK(t[0] == doctest::Approx(0.25));
    CHECK(t[3] == doctest::Approx(1.75));
    CHECK(ddm_pulse_instants(4, 2.0, t, 3) == DDM_E_CAPACITY);
}

TEST_CASE("spectra and chi") {
    Spectrum ohm, lor;
    REQUIRE(ddm_spectrum_ohmic(0.1, 1.0, &ohm.p) == DDM_OK);
    REQUIRE(ddm_spectrum_lorentzian(1.0, 1.0, &lor.p) == DDM_OK);
    CHECK(std::string(ddm_spectrum_name(ohm.p)).find("ohmic") != std::string::npos);
    double j = 0.0;
    CHECK(ddm_spectrum_density(ohm.p, 0.5, &j) == DDM_OK);
    CHECK(j == doctest::Approx(0.1));
    CHECK(ddm_spectrum_density(ohm.p, 2.0, &j) == DDM_OK);
    CHECK(j == 0.0);
    Spectrum bad;
    CHECK(ddm_spectrum_lorentzian(-1.0, 1.0, &bad.p) == DDM_E_INVALID_ARGUMENT);
    CHECK(bad.p == nullptr);

    ddm_chi_result r{};
    CHECK(ddm_chi_quantum(ohm.p, 0.0, 2, 1e-2, 3, 0.0, &r) == DDM_OK);
    ddm_small_tau s{};
    CHECK(ddm_chi_small_tau(0.1, 1.0, 2, 1e-2, 3, &s) == DDM_OK);
    CHECK(s.tau_exponent == 6);
    CHECK(r.chi == doctest::Approx(s.chi).epsilon(0.01));
    CHECK(ddm_chi_quantum(lor.p, 0.0, 2, 1.0, 1, 0.0, &r) == DDM_E_INVALID_ARGUMENT);
    CHECK(ddm_chi_classical(lor.p, 0, 0.05, 1, 0.0, &r) == DDM_OK);
    CHECK(r.chi == doctest::Approx((0.05 - 1.0 + std::exp(-0.05)) / 2.0).epsilon(1e-8));

    std::vector<double> tau{0.1, 0.2, 0.4, 0.8, 1.6}, chi;
    for (double t : tau) chi.push_back(3.0 * std::pow(t, 2.5));
    ddm_power_law fit{};
    CHECK(ddm_fit_power_law(tau.data(), chi.data(), tau.size(), &fit) == DDM_OK);
    CHECK(fit.exponent == doctest::Approx(2.5));
    CHECK(ddm_fit_power_law(tau.data(), chi.data(), 3, &fit) != DDM_OK);
}

TEST_CASE("tabulated spectra from memory and from disk") {
    const double omega[] = {0.0, 1.0, 2.0};
    const double value[] = {0.0, 0.2, 0.4};
    Spectrum tab;
    REQUIRE(ddm_spectrum_tabulated(omega, value, 3, &tab.p) == DDM_OK);
    double j = 0.0;
    CHECK(ddm_spectrum_density(tab.p, 1.5, &j) == DDM_OK);
    CHECK(j == doctest::Approx(0.3));

    const auto path = (std::filesystem::temp_directory_path() / "ddm_capi_spec.csv").string();
    if (FILE* f = std::fopen(path.c_str(), "w")) {
        std::fputs("omega,J\n0,0\n1,0.2\n2,0.4\n", f);
        std::fclose(f);
    }
    Spectrum disk;
    CHECK(ddm_spectrum_load_csv(path.c_str(), &disk.p) == DDM_OK);
    CHECK(ddm_spectrum_density(disk.p, 1.5, &j) == DDM_OK);
    CHECK(j == doctest::Approx(0.3));
    std::filesystem::remove(path);
    Spectrum missing;
    CHECK(ddm_spectrum_load_csv("/nonexistent/spec.csv", &missing.p) == DDM_E_IO);
}

TEST_CASE("precision and optimal tau") {
    ddm_ensemble cfg;
    ddm_ensemble_default(&cfg);
    cfg.qubits = 4;
    cfg.total_time = 100.0;
    ddm_precision_point p{};
    CHECK(ddm_precision_ghz(&cfg, 0.5, 0.0, ddm_max_slope_bias(), &p) == DDM_OK);
    const double pi = std::acos(-1.0);
    CHECK(p.delta_delta == doctest::Approx(pi / (4.0 * 4 * 0.5 * std::sqrt(100.0 / 0.5))));
    CHECK(ddm_precision_ghz(&cfg, 0.5, 0.0, 0.0, &p) == DDM_E_INSENSITIVE);
    double s = 0.0;
    CHECK(ddm_signal_ghz(&cfg, 0.25, 0.5, 0.0, &s) == DDM_OK);
    CHECK(s == doctest::Approx(std::exp(-0.5)));

    Model law;
    REQUIRE(ddm_chi_model_power_law(0.01, 3.0, &law.p) == DDM_OK);
    double c = 0.0;
    CHECK(ddm_chi_model_eval(law.p, 2.0, 4, &c) == DDM_OK);
    CHECK(c == doctest::Approx(0.32));
    CHECK(ddm_optimal_tau(&cfg, law.p, DDM_PROTOCOL_GHZ, nullptr, &p) == DDM_OK);
    // τ* = (1/(4 a N v))^{1/v}
    CHECK(p.tau == doctest::Approx(std::pow(1.0 / (4.0 * 0.01 * 4 * 3.0), 1.0 / 3.0)).epsilon(1e-3));

    Model none;
    REQUIRE(ddm_chi_model_power_law(0.0, 3.0, &none.p) == DDM_E_INVALID_ARGUMENT);
}

TEST_CASE("spectrum models check the bath") {
    Spectrum ohm, gau;
    REQUIRE(ddm_spectrum_ohmic(1e8, 1.0, &ohm.p) == DDM_OK);
    REQUIRE(ddm_spectrum_gaussian(1.0, 1.0, &gau.p) == DDM_OK);
    Model m;
    CHECK(ddm_chi_model_spectrum(ohm.p, DDM_BATH_CLASSICAL, 0.0, 1, 0.0, &m.p) == DDM_E_INVALID_ARGUMENT);
    CHECK(ddm_chi_model_spectrum(gau.p, DDM_BATH_QUANTUM, 0.0, 1, 0.0, &m.p) == DDM_E_INVALID_ARGUMENT);
    CHECK(ddm_chi_model_spectrum(ohm.p, DDM_BATH_QUANTUM, 0.0, 1, 0.0, &m.p) == DDM_OK);
    double c = 0.0;
    CHECK(ddm_chi_model_eval(m.p, 1e-3, 2, &c) == DDM_OK);
    CHECK(c > 0.0);
}

TEST_CASE("scaling scan through callbacks") {
    ddm_ensemble cfg;
    ddm_ensemble_default(&cfg);
    cfg.total_time = 1e3;
    int broken = 64;
    Model m;
    REQUIRE(ddm_chi_model_callback(flaky_chi, &broken, &m.p) == DDM_OK);
    const int qubits[] = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    Scan scan;
    REQUIRE(ddm_scaling_scan(&cfg, m.p, DDM_PROTOCOL_GHZ, qubits, 10, nullptr, &scan.p) == DDM_OK);
    ddm_scaling_summary sum{};
    CHECK(ddm_scaling_summary_get(scan.p, &sum) == DDM_OK);
    CHECK(sum.points == 10);
    CHECK(sum.k == doctest::Approx(7.0 / 8.0).epsilon(1e-3));
    ddm_scaling_point pt{};
    CHECK(ddm_scaling_point_get(scan.p, 5, &pt) == DDM_OK);
    CHECK(pt.qubits == 64);
    CHECK(pt.ok == 0);
    CHECK(std::strlen(ddm_scaling_point_error(scan.p, 5)) > 0);
    CHECK(std::strlen(ddm_scaling_point_error(scan.p, 4)) == 0);
    CHECK(ddm_scaling_point_get(scan.p, 10, &pt) == DDM_E_INVALID_ARGUMENT);

    Scan short_scan;
    CHECK(ddm_scaling_scan(&cfg, m.p, DDM_PROTOCOL_GHZ, qubits, 4, nullptr, &short_scan.p) ==
          DDM_E_INVALID_ARGUMENT);
}

TEST_CASE("monte carlo") {
    Spectrum lor, ohm;
    REQUIRE(ddm_spectrum_lorentzian(1.0, 1.0, &lor.p) == DDM_OK);
    REQUIRE(ddm_spectrum_ohmic(0.1, 1.0, &ohm.p) == DDM_OK);
    ddm_mc_estimate a{}, b{};
    CHECK(ddm_mc_estimate_chi(lor.p, 1, 1.0, 2000, 5, 1, &a) == DDM_OK);
    CHECK(ddm_mc_estimate_chi(lor.p, 1, 1.0, 2000, 5, 2, &b) == DDM_OK);
    CHECK(a.chi == b.chi);
    CHECK(a.trials == 2000);
    CHECK(a.low_confidence == 1);
    CHECK(ddm_mc_estimate_chi(ohm.p, 1, 1.0, 2000, 5, 1, &a) == DDM_E_INVALID_ARGUMENT);
}

TEST_CASE("probe states") {
    State ghz;
    REQUIRE(ddm_state_ghz(40, &ghz.p) == DDM_OK);
    CHECK(ddm_state_qubits(ghz.p) == 40);
    ddm_moments m{};
    CHECK(ddm_state_moments(ghz.p, &m) == DDM_OK);
    CHECK(m.kappa == doctest::Approx(800.0));

    const double re[] = {0.6, 0.0, 0.0, 0.8};
    State dense;
    REQUIRE(ddm_state_dense(2, re, nullptr, 4, &dense.p) == DDM_OK);
    double p = 0.0;
    CHECK(ddm_state_p_coherent(dense.p, 0.0, &p) == DDM_OK);
    CHECK(p == doctest::Approx(1.0));
    CHECK(ddm_state_p_decohered(dense.p, 0.0, 100.0, 1.0, &p) == DDM_OK);
    CHECK(p == doctest::Approx(0.36 * 0.36 + 0.64 * 0.64));
    double b0 = 0.0, b1 = 0.0;
    CHECK(ddm_state_bound_coherent(dense.p, 0.1, 50.0, &b0) == DDM_OK);
    CHECK(ddm_state_bound_decohered(dense.p, 0.1, 50.0, 0.0, 0.0, &b1) == DDM_OK);
    CHECK(b0 == doctest::Approx(b1));

    const double basis[] = {0.0, 1.0};
    State flat;
    REQUIRE(ddm_state_dense(1, basis, nullptr, 2, &flat.p) == DDM_OK);
    CHECK(ddm_state_bound_coherent(flat.p, 0.1, 50.0, &b0) == DDM_E_GENERATOR_INSENSITIVE);
    State wrong;
    CHECK(ddm_state_dense(2, re, nullptr, 3, &wrong.p) == DDM_E_INVALID_ARGUMENT);
    std::vector<double> big(std::size_t{1} << 13, 0.0);
    big[0] = 1.0;
    State huge;
    CHECK(ddm_state_dense(13, big.data(), nullptr, big.size(), &huge.p) == DDM_E_CAPACITY);
}
