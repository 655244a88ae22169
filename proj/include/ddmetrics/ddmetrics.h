#ifndef DDMETRICS_DDMETRICS_H
#define DDMETRICS_DDMETRICS_H

#include <stddef.h>
#include <stdint.h>

#if defined(DDM_BUILDING_LIBRARY)
#define DDM_API __attribute__((visibility("default")))
#else
#define DDM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure ddm_last_error() holds a
 * message for the calling thread until its next failing call. */
typedef enum ddm_status {
    DDM_OK = 0,
    DDM_E_INVALID_ARGUMENT = 1,
    DDM_E_DOMAIN = 2,
    DDM_E_INTEGRATION = 3,
    DDM_E_NO_INTERIOR_MINIMUM = 4,
    DDM_E_INSENSITIVE = 5,
    DDM_E_GENERATOR_INSENSITIVE = 6,
    DDM_E_CAPACITY = 7,
    DDM_E_IO = 8,
    DDM_E_FIT = 9,
    DDM_E_NO_MEMORY = 10,
    DDM_E_INTERNAL = 99
} ddm_status;

DDM_API const char* ddm_last_error(void);
DDM_API const char* ddm_status_name(ddm_status status);
DDM_API const char* ddm_version(void);

/* ---- noise spectra ---- */

typedef struct ddm_spectrum ddm_spectrum;

DDM_API ddm_status ddm_spectrum_ohmic(double alpha, double omega_d, ddm_spectrum** out);
DDM_API ddm_status ddm_spectrum_lorentzian(double sigma, double tau_c, ddm_spectrum** out);
DDM_API ddm_status ddm_spectrum_gaussian(double sigma, double tau_c, ddm_spectrum** out);
/* Linear interpolation on a strictly increasing grid, zero outside it. */
DDM_API ddm_status ddm_spectrum_tabulated(const double* omega, const double* value, size_t count,
                                          ddm_spectrum** out);
DDM_API ddm_status ddm_spectrum_load_csv(const char* path, ddm_spectrum** out);
DDM_API void ddm_spectrum_free(ddm_spectrum* spec);

DDM_API ddm_status ddm_spectrum_density(const ddm_spectrum* spec, double omega, double* out);
/* "ohmic", "lorentzian", "gaussian" or "tabulated"; owned by the handle. */
DDM_API const char* ddm_spectrum_name(const ddm_spectrum* spec);

/* ---- pulse filter ---- */

/* Normalized filter F_n(z) = |y_n(z)|^2 / 2 (closed form). */
DDM_API ddm_status ddm_filter(double z, int pulses, double* out);
/* The same quantity evaluated from the pulse sum. */
DDM_API ddm_status ddm_filter_from_sum(double z, int pulses, double* out);
/* Raw |y_n(z)|^2. */
DDM_API ddm_status ddm_filter_sum_squared(double z, int pulses, double* out);
/* Writes the n pulse instants; DDM_E_CAPACITY when capacity < pulses. */
DDM_API ddm_status ddm_pulse_instants(int pulses, double tau, double* out, size_t capacity);

/* ---- decoherence exponent ---- */

typedef struct ddm_chi_result {
    double chi;
    double abs_error;
    size_t evaluations;
} ddm_chi_result;

/* rel_tol <= 0 selects the default 1e-10. */
DDM_API ddm_status ddm_chi_quantum(const ddm_spectrum* spec, double temperature, int pulses, double tau,
                                   int qubits, double rel_tol, ddm_chi_result* out);
DDM_API ddm_status ddm_chi_classical(const ddm_spectrum* spec, int pulses, double tau, int qubits,
                                     double rel_tol, ddm_chi_result* out);

typedef struct ddm_small_tau {
    double chi;
    double prefactor;
    int tau_exponent;
    int outside_regime;
} ddm_small_tau;

DDM_API ddm_status ddm_chi_small_tau(double alpha, double omega_d, int pulses, double tau, int qubits,
                                     ddm_small_tau* out);

typedef struct ddm_power_law {
    double exponent;
    double prefactor;
    double exponent_stderr;
    double max_log_residual;
} ddm_power_law;

/* Fit of log chi against log tau; needs >= 5 positive points. */
DDM_API ddm_status ddm_fit_power_law(const double* tau, const double* chi, size_t count, ddm_power_law* out);

/* ---- signal and precision ---- */

typedef struct ddm_ensemble {
    int qubits;
    double detuning;
    double total_time;
} ddm_ensemble;

DDM_API void ddm_ensemble_default(ddm_ensemble* cfg);

typedef struct ddm_precision_point {
    double tau;
    double signal;
    double chi;
    double delta_delta;
} ddm_precision_point;

typedef enum ddm_protocol { DDM_PROTOCOL_GHZ = 0, DDM_PROTOCOL_SEPARABLE = 1 } ddm_protocol;

DDM_API double ddm_max_slope_bias(void);
DDM_API ddm_status ddm_signal_ghz(const ddm_ensemble* cfg, double chi, double tau, double bias, double* out);
DDM_API ddm_status ddm_precision_ghz(const ddm_ensemble* cfg, double tau, double chi, double bias,
                                     ddm_precision_point* out);
DDM_API ddm_status ddm_precision_separable(const ddm_ensemble* cfg, double tau, double chi_single, double bias,
                                           ddm_precision_point* out);

/* chi(tau, qubits) used by the optimizers. */
typedef struct ddm_chi_model ddm_chi_model;
typedef enum ddm_bath { DDM_BATH_QUANTUM = 0, DDM_BATH_CLASSICAL = 1 } ddm_bath;
/* May be called from several threads at once; return a negative value to
 * signal failure. */
typedef double (*ddm_chi_callback)(double tau, int qubits, void* user);

DDM_API ddm_status ddm_chi_model_spectrum(const ddm_spectrum* spec, ddm_bath bath, double temperature, int pulses,
                                          double rel_tol, ddm_chi_model** out);
DDM_API ddm_status ddm_chi_model_power_law(double a, double v, ddm_chi_model** out);
DDM_API ddm_status ddm_chi_model_callback(ddm_chi_callback fn, void* user, ddm_chi_model** out);
DDM_API void ddm_chi_model_free(ddm_chi_model* model);
DDM_API ddm_status ddm_chi_model_eval(const ddm_chi_model* model, double tau, int qubits, double* out);

typedef struct ddm_tau_search {
    double initial_tau; /* 0 picks total_time * 1e-3 */
    double rel_tol;
    double bias;
} ddm_tau_search;

DDM_API void ddm_tau_search_default(ddm_tau_search* search);

/* search may be NULL for the defaults. */
DDM_API ddm_status ddm_optimal_tau(const ddm_ensemble* cfg, const ddm_chi_model* model, ddm_protocol protocol,
                                   const ddm_tau_search* search, ddm_precision_point* out);

typedef struct ddm_scaling ddm_scaling;

typedef struct ddm_scaling_summary {
    double k;
    double stderr_k;
    double mean_local_exponent;
    double predicted_k;
    double enhancement_exponent;
    double predicted_enhancement;
    size_t points;
} ddm_scaling_summary;

typedef struct ddm_scaling_point {
    int qubits;
    double tau_star;
    double chi_star;
    double delta_delta_star;
    double local_exponent;
    int ok;
} ddm_scaling_point;

DDM_API ddm_status ddm_scaling_scan(const ddm_ensemble* tmpl, const ddm_chi_model* model, ddm_protocol protocol,
                                    const int* qubits, size_t count, const ddm_tau_search* search,
                                    ddm_scaling** out);
DDM_API ddm_status ddm_scaling_summary_get(const ddm_scaling* scan, ddm_scaling_summary* out);
DDM_API ddm_status ddm_scaling_point_get(const ddm_scaling* scan, size_t index, ddm_scaling_point* out);
/* Empty string for points that succeeded; owned by the handle. */
DDM_API const char* ddm_scaling_point_error(const ddm_scaling* scan, size_t index);
DDM_API void ddm_scaling_free(ddm_scaling* scan);

/* ---- Monte Carlo ---- */

typedef struct ddm_mc_estimate {
    double chi;
    double stderr_chi;
    double mean_cos;
    double phase_variance;
    double dt;
    size_t trials;
    size_t steps;
    int low_confidence;
} ddm_mc_estimate;

/* Per-qubit chi from sampled lorentzian or gaussian noise; workers = 0 uses
 * DDMETRICS_THREADS or the hardware concurrency. */
DDM_API ddm_status ddm_mc_estimate_chi(const ddm_spectrum* spec, int pulses, double tau, size_t trials,
                                       uint64_t seed, unsigned workers, ddm_mc_estimate* out);

/* ---- probe states ---- */

typedef struct ddm_state ddm_state;

DDM_API ddm_status ddm_state_ghz(int qubits, ddm_state** out);
/* re/im hold 2^qubits amplitudes; im may be NULL. */
DDM_API ddm_status ddm_state_dense(int qubits, const double* re, const double* im, size_t count, ddm_state** out);
DDM_API ddm_status ddm_state_load_csv(const char* path, int qubits, ddm_state** out);
DDM_API void ddm_state_free(ddm_state* state);
DDM_API int ddm_state_qubits(const ddm_state* state);

typedef struct ddm_moments {
    double mean;
    double second;
    double kappa;
} ddm_moments;

DDM_API ddm_status ddm_state_moments(const ddm_state* state, ddm_moments* out);
DDM_API ddm_status ddm_state_p_coherent(const ddm_state* state, double phi, double* out);
DDM_API ddm_status ddm_state_p_decohered(const ddm_state* state, double phi, double alpha_rate, double tau,
                                         double* out);
DDM_API ddm_status ddm_state_bound_coherent(const ddm_state* state, double tau, double repetitions, double* out);
/* theta <= 0 selects the default 0.1. */
DDM_API ddm_status ddm_state_bound_decohered(const ddm_state* state, double tau, double repetitions,
                                             double alpha_rate, double theta, double* out);

#ifdef __cplusplus
}
#endif

#endif
