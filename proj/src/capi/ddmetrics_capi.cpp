#include "ddmetrics/ddmetrics.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "decoherence.hpp"
#include "error.hpp"
#include "general_state.hpp"
#include "mc_oracle.hpp"
#include "noise.hpp"
#include "precision.hpp"
#include "pulse_filter.hpp"

struct ddm_spectrum {
    ddm::NoiseSpectrum spec;
    std::string name;
};

struct ddm_state {
    ddm::ProbeState state;
};

struct ddm_chi_model {
    ddm::ChiModel fn;
};

struct ddm_scaling {
    ddm::ScalingFit fit;
};

namespace {

thread_local std::string last_error;

ddm_status record(ddm_status status, const char* message) {
    last_error = message;
    return status;
}

template <class F>
ddm_status guarded(F&& body) {
    try {
        body();
        return DDM_OK;
    } catch (const ddm::Error& e) {
        return record(static_cast<ddm_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return record(DDM_E_NO_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return record(DDM_E_INTERNAL, e.what());
    } catch (...) {
        return record(DDM_E_INTERNAL, "unknown error");
    }
}

template <class... P>
void require(P*... ptrs) {
    if (((ptrs == nullptr) || ...)) ddm::fail(ddm::Errc::invalid_argument, "null pointer argument");
}

ddm::ChiOptions chi_options(double rel_tol) {
    ddm::ChiOptions opt;
    if (rel_tol > 0.0) opt.rel_tol = rel_tol;
    return opt;
}

ddm::EnsembleConfig ensemble(const ddm_ensemble* cfg) {
    ddm::EnsembleConfig out;
    out.qubits = cfg->qubits;
    out.detuning = cfg->detuning;
    out.total_time = cfg->total_time;
    return out;
}

ddm::TauSearch tau_search(const ddm_tau_search* s) {
    ddm::TauSearch out;
    if (s) {
        out.initial_tau = s->initial_tau;
        out.rel_tol = s->rel_tol;
        out.bias = s->bias;
    }
    return out;
}

void put(const ddm::PrecisionPoint& p, ddm_precision_point* out) {
    out->tau = p.tau;
    out->signal = p.signal;
    out->chi = p.chi;
    out->delta_delta = p.delta_delta;
}

ddm_status make_spectrum(ddm::NoiseSpectrum spec, ddm_spectrum** out) {
    *out = new ddm_spectrum{std::move(spec), {}};
    (*out)->name = (*out)->spec.name();
    return DDM_OK;
}

}  // namespace

extern "C" {

const char* ddm_last_error(void) { return last_error.c_str(); }

const char* ddm_status_name(ddm_status status) {
    switch (status) {
        case DDM_OK: return "ok";
        case DDM_E_INVALID_ARGUMENT: return "invalid_argument";
        case DDM_E_DOMAIN: return "domain";
        case DDM_E_INTEGRATION: return "integration_failure";
        case DDM_E_NO_INTERIOR_MINIMUM: return "no_interior_minimum";
        case DDM_E_INSENSITIVE: return "insensitive_operating_point";
        case DDM_E_GENERATOR_INSENSITIVE: return "generator_insensitive";
        case DDM_E_CAPACITY: return "capacity";
        case DDM_E_IO: return "io";
        case DDM_E_FIT: return "fit_failure";
        case DDM_E_NO_MEMORY: return "no_memory";
        case DDM_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ddm_version(void) { return "0.1.0"; }

ddm_status ddm_spectrum_ohmic(double alpha, double omega_d, ddm_spectrum** out) {
    return guarded([&] {
        require(out);
        make_spectrum(ddm::NoiseSpectrum::ohmic(alpha, omega_d), out);
    });
}

ddm_status ddm_spectrum_lorentzian(double sigma, double tau_c, ddm_spectrum** out) {
    return guarded([&] {
        require(out);
        make_spectrum(ddm::NoiseSpectrum::lorentzian(sigma, tau_c), out);
    });
}

ddm_status ddm_spectrum_gaussian(double sigma, double tau_c, ddm_spectrum** out) {
    return guarded([&] {
        require(out);
        make_spectrum(ddm::NoiseSpectrum::gaussian(sigma, tau_c), out);
    });
}

ddm_status ddm_spectrum_tabulated(const double* omega, const double* value, size_t count, ddm_spectrum** out) {
    return guarded([&] {
        require(omega, value, out);
        make_spectrum(ddm::NoiseSpectrum::tabulated({omega, omega + count}, {value, value + count}), out);
    });
}

ddm_status ddm_spectrum_load_csv(const char* path, ddm_spectrum** out) {
    return guarded([&] {
        require(path, out);
        make_spectrum(ddm::load_tabulated_csv(path), out);
    });
}

void ddm_spectrum_free(ddm_spectrum* spec) { delete spec; }

ddm_status ddm_spectrum_density(const ddm_spectrum* spec, double omega, double* out) {
    return guarded([&] {
        require(spec, out);
        *out = ddm::density(spec->spec, omega);
    });
}

const char* ddm_spectrum_name(const ddm_spectrum* spec) { return spec ? spec->name.c_str() : ""; }

ddm_status ddm_filter(double z, int pulses, double* out) {
    return guarded([&] {
        require(out);
        if (pulses < 0) ddm::fail(ddm::Errc::invalid_argument, "pulse count must be >= 0");
        *out = ddm::filter_value(z, pulses);
    });
}

ddm_status ddm_filter_from_sum(double z, int pulses, double* out) {
    return guarded([&] {
        require(out);
        *out = ddm::filter_from_sum(z, pulses);
    });
}

ddm_status ddm_filter_sum_squared(double z, int pulses, double* out) {
    return guarded([&] {
        require(out);
        *out = ddm::filter_sum_squared(z, pulses);
    });
}

ddm_status ddm_pulse_instants(int pulses, double tau, double* out, size_t capacity) {
    return guarded([&] {
        const auto instants = ddm::pulse_instants(ddm::PulseSequence(pulses, tau));
        if (instants.size() > capacity) ddm::fail(ddm::Errc::capacity, "output buffer too small for pulse instants");
        if (!instants.empty()) require(out);
        std::copy(instants.begin(), instants.end(), out);
    });
}

ddm_status ddm_chi_quantum(const ddm_spectrum* spec, double temperature, int pulses, double tau, int qubits,
                           double rel_tol, ddm_chi_result* out) {
    return guarded([&] {
        require(spec, out);
        const auto r =
            ddm::chi_quantum(spec->spec, temperature, ddm::PulseSequence(pulses, tau), qubits, chi_options(rel_tol));
        *out = {r.chi, r.abs_error, r.evaluations};
    });
}

ddm_status ddm_chi_classical(const ddm_spectrum* spec, int pulses, double tau, int qubits, double rel_tol,
                             ddm_chi_result* out) {
    return guarded([&] {
        require(spec, out);
        const auto r = ddm::chi_classical(spec->spec, ddm::PulseSequence(pulses, tau), qubits, chi_options(rel_tol));
        *out = {r.chi, r.abs_error, r.evaluations};
    });
}

ddm_status ddm_chi_small_tau(double alpha, double omega_d, int pulses, double tau, int qubits, ddm_small_tau* out) {
    return guarded([&] {
        require(out);
        const ddm::NoiseSpectrum spec = ddm::NoiseSpectrum::ohmic(alpha, omega_d);
        const auto r =
            ddm::chi_small_tau(std::get<ddm::OhmicCutoff>(spec.model()), ddm::PulseSequence(pulses, tau), qubits);
        *out = {r.chi, r.prefactor, r.tau_exponent, r.outside_regime ? 1 : 0};
    });
}

ddm_status ddm_fit_power_law(const double* tau, const double* chi, size_t count, ddm_power_law* out) {
    return guarded([&] {
        require(tau, chi, out);
        const auto r = ddm::fit_power_law({tau, count}, {chi, count});
        *out = {r.exponent, r.prefactor, r.exponent_stderr, r.max_log_residual};
    });
}

void ddm_ensemble_default(ddm_ensemble* cfg) {
    if (!cfg) return;
    const ddm::EnsembleConfig d;
    *cfg = {d.qubits, d.detuning, d.total_time};
}

double ddm_max_slope_bias(void) { return ddm::kMaxSlopeBias; }

ddm_status ddm_signal_ghz(const ddm_ensemble* cfg, double chi, double tau, double bias, double* out) {
    return guarded([&] {
        require(cfg, out);
        *out = ddm::signal_ghz(ensemble(cfg), chi, tau, bias);
    });
}

ddm_status ddm_precision_ghz(const ddm_ensemble* cfg, double tau, double chi, double bias, ddm_precision_point* out) {
    return guarded([&] {
        require(cfg, out);
        put(ddm::uncertainty_ghz(ensemble(cfg), tau, chi, bias), out);
    });
}

ddm_status ddm_precision_separable(const ddm_ensemble* cfg, double tau, double chi_single, double bias,
                                   ddm_precision_point* out) {
    return guarded([&] {
        require(cfg, out);
        put(ddm::uncertainty_separable(ensemble(cfg), tau, chi_single, bias), out);
    });
}

ddm_status ddm_chi_model_spectrum(const ddm_spectrum* spec, ddm_bath bath, double temperature, int pulses,
                                  double rel_tol, ddm_chi_model** out) {
    return guarded([&] {
        require(spec, out);
        if (pulses < 0) ddm::fail(ddm::Errc::invalid_argument, "pulse count must be >= 0");
        ddm::BathKind kind = ddm::ClassicalHighT{};
        if (bath == DDM_BATH_QUANTUM) {
            if (!spec->spec.admits_quantum())
                ddm::fail(ddm::Errc::invalid_argument, "quantum bath needs an ohmic or tabulated spectrum");
            kind = ddm::QuantumBath{temperature};
        } else if (!spec->spec.admits_classical()) {
            ddm::fail(ddm::Errc::invalid_argument, "classical bath needs a lorentzian, gaussian or tabulated spectrum");
        }
        *out = new ddm_chi_model{ddm::spectrum_chi_model(spec->spec, kind, pulses, chi_options(rel_tol))};
    });
}

ddm_status ddm_chi_model_power_law(double a, double v, ddm_chi_model** out) {
    return guarded([&] {
        require(out);
        *out = new ddm_chi_model{ddm::power_law_chi_model(a, v)};
    });
}

ddm_status ddm_chi_model_callback(ddm_chi_callback fn, void* user, ddm_chi_model** out) {
    return guarded([&] {
        if (!fn) ddm::fail(ddm::Errc::invalid_argument, "null callback");
        require(out);
        *out = new ddm_chi_model{[fn, user](double tau, int qubits) {
            const double v = fn(tau, qubits, user);
            if (!(v >= 0.0)) ddm::fail(ddm::Errc::invalid_argument, "chi callback reported failure");
            return v;
        }};
    });
}

void ddm_chi_model_free(ddm_chi_model* model) { delete model; }

ddm_status ddm_chi_model_eval(const ddm_chi_model* model, double tau, int qubits, double* out) {
    return guarded([&] {
        require(model, out);
        *out = model->fn(tau, qubits);
    });
}

void ddm_tau_search_default(ddm_tau_search* search) {
    if (!search) return;
    const ddm::TauSearch d;
    *search = {d.initial_tau, d.rel_tol, d.bias};
}

ddm_status ddm_optimal_tau(const ddm_ensemble* cfg, const ddm_chi_model* model, ddm_protocol protocol,
                           const ddm_tau_search* search, ddm_precision_point* out) {
    return guarded([&] {
        require(cfg, model, out);
        const auto proto = protocol == DDM_PROTOCOL_SEPARABLE ? ddm::Protocol::separable : ddm::Protocol::ghz;
        const int probe = proto == ddm::Protocol::ghz ? cfg->qubits : 1;
        const auto r = ddm::optimal_tau(
            ensemble(cfg), [&](double tau) { return model->fn(tau, probe); }, proto, tau_search(search));
        put(r.point, out);
    });
}

ddm_status ddm_scaling_scan(const ddm_ensemble* tmpl, const ddm_chi_model* model, ddm_protocol protocol,
                            const int* qubits, size_t count, const ddm_tau_search* search, ddm_scaling** out) {
    return guarded([&] {
        require(tmpl, model, qubits, out);
        const auto proto = protocol == DDM_PROTOCOL_SEPARABLE ? ddm::Protocol::separable : ddm::Protocol::ghz;
        auto fit = ddm::scaling_scan(ensemble(tmpl), model->fn, proto, {qubits, count}, tau_search(search));
        *out = new ddm_scaling{std::move(fit)};
    });
}

ddm_status ddm_scaling_summary_get(const ddm_scaling* scan, ddm_scaling_summary* out) {
    return guarded([&] {
        require(scan, out);
        const auto& f = scan->fit;
        *out = {f.k, f.stderr, f.mean_local_exponent, f.predicted_k, f.enhancement_exponent, f.predicted_enhancement,
                f.points.size()};
    });
}

ddm_status ddm_scaling_point_get(const ddm_scaling* scan, size_t index, ddm_scaling_point* out) {
    return guarded([&] {
        require(scan, out);
        if (index >= scan->fit.points.size()) ddm::fail(ddm::Errc::invalid_argument, "scaling point index out of range");
        const auto& p = scan->fit.points[index];
        *out = {p.qubits, p.tau_star, p.chi_star, p.delta_delta_star, p.local_exponent, p.error.empty() ? 1 : 0};
    });
}

const char* ddm_scaling_point_error(const ddm_scaling* scan, size_t index) {
    if (!scan || index >= scan->fit.points.size()) return "";
    return scan->fit.points[index].error.c_str();
}

void ddm_scaling_free(ddm_scaling* scan) { delete scan; }

ddm_status ddm_mc_estimate_chi(const ddm_spectrum* spec, int pulses, double tau, size_t trials, uint64_t seed,
                               unsigned workers, ddm_mc_estimate* out) {
    return guarded([&] {
        require(spec, out);
        ddm::McOptions opt;
        opt.workers = workers;
        const auto e = ddm::estimate_chi(spec->spec, ddm::PulseSequence(pulses, tau), trials, seed, opt);
        *out = {e.chi, e.stderr, e.mean_cos, e.phase_variance, e.dt, e.trials, e.steps, e.low_confidence ? 1 : 0};
    });
}

ddm_status ddm_state_ghz(int qubits, ddm_state** out) {
    return guarded([&] {
        require(out);
        *out = new ddm_state{ddm::ProbeState::ghz(qubits)};
    });
}

ddm_status ddm_state_dense(int qubits, const double* re, const double* im, size_t count, ddm_state** out) {
    return guarded([&] {
        require(re, out);
        std::vector<std::complex<double>> amps(count);
        for (size_t i = 0; i < count; ++i) amps[i] = {re[i], im ? im[i] : 0.0};
        *out = new ddm_state{ddm::ProbeState::dense(qubits, std::move(amps))};
    });
}

ddm_status ddm_state_load_csv(const char* path, int qubits, ddm_state** out) {
    return guarded([&] {
        require(path, out);
        *out = new ddm_state{ddm::load_state_csv(path, qubits)};
    });
}

void ddm_state_free(ddm_state* state) { delete state; }

int ddm_state_qubits(const ddm_state* state) { return state ? state->state.qubits() : 0; }

ddm_status ddm_state_moments(const ddm_state* state, ddm_moments* out) {
    return guarded([&] {
        require(state, out);
        const auto m = ddm::generator_moments(state->state);
        *out = {m.mean, m.second, m.kappa};
    });
}

ddm_status ddm_state_p_coherent(const ddm_state* state, double phi, double* out) {
    return guarded([&] {
        require(state, out);
        *out = ddm::probability_coherent(state->state, phi);
    });
}

ddm_status ddm_state_p_decohered(const ddm_state* state, double phi, double alpha_rate, double tau, double* out) {
    return guarded([&] {
        require(state, out);
        *out = ddm::probability_decohered(state->state, phi, alpha_rate, tau);
    });
}

ddm_status ddm_state_bound_coherent(const ddm_state* state, double tau, double repetitions, double* out) {
    return guarded([&] {
        require(state, out);
        *out = ddm::bound_coherent(state->state, tau, repetitions);
    });
}

ddm_status ddm_state_bound_decohered(const ddm_state* state, double tau, double repetitions, double alpha_rate,
                                     double theta, double* out) {
    return guarded([&] {
        require(state, out);
        *out = ddm::bound_decohered(state->state, tau, repetitions, alpha_rate, theta > 0.0 ? theta : 0.1);
    });
}

}  // extern "C"
