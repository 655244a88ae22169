#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "noise.hpp"
#include "pulse_filter.hpp"
#include "rng.hpp"

namespace ddm {

/// Stationary Ornstein-Uhlenbeck path via its exact AR(1) discretization:
/// x_0 ~ N(0, σ²), x_{k+1} = x_k e^{-dt/τ_c} + σ sqrt(1 - e^{-2dt/τ_c}) ξ_k.
std::vector<double> sample_ou_path(double sigma, double tau_c, double dt, std::size_t steps, CounterStream& stream);

/// Circulant-embedding sampler for the stationary Gaussian process with
/// autocovariance σ² exp(-t²/2τ_c²) on a grid of `steps` points spaced dt.
class GaussianPathSampler {
public:
    GaussianPathSampler(double sigma, double tau_c, double dt, std::size_t steps);
    ~GaussianPathSampler();
    GaussianPathSampler(const GaussianPathSampler&) = delete;
    GaussianPathSampler& operator=(const GaussianPathSampler&) = delete;

    std::size_t steps() const noexcept { return steps_; }

    /// Two independent paths (real and imaginary parts of one transform).
    std::pair<std::vector<double>, std::vector<double>> sample_pair(CounterStream& stream) const;

private:
    struct Plan;
    double sigma_;
    std::size_t steps_;
    std::size_t size_;                  // circulant size, 2 * steps
    std::vector<double> sqrt_weights_;  // sqrt(λ_j / size)
    std::unique_ptr<Plan> plan_;
};

/// One path from GaussianPathSampler; needs steps·dt >= 10 τ_c.
std::vector<double> sample_gaussian_spectrum_path(double sigma, double tau_c, double dt, std::size_t steps,
                                                  CounterStream& stream);

/// +1 on [0, δ_1), flipping sign at every pulse instant; t outside [0, τ]
/// throws a domain error.
int toggling_sign(double t, const PulseSequence& seq);

/// Below this the bootstrap error itself is too noisy to trust.
inline constexpr std::size_t kMinConfidentTrials = 10000;

struct McOptions {
    std::size_t min_steps_per_half_segment = 1;  // L in dt = τ/(2nL); raised to meet the dt limits
    std::size_t bootstrap_resamples = 200;
    unsigned workers = 0;  // 0 = worker_count()
};

struct McEstimate {
    double chi = 0.0;              // per qubit: Var(Φ)/4
    double stderr = 0.0;           // bootstrap standard error of chi
    double mean_cos = 0.0;         // <cos Φ>
    double phase_variance = 0.0;   // Var(Φ)
    std::size_t trials = 0;
    double dt = 0.0;
    std::size_t steps = 0;
    bool low_confidence = false;   // stderr > 20% of chi, or fewer than kMinConfidentTrials trials
};

/// Grid used for phase accumulation: dt = τ/(2nL) (τ/L for n = 0) with
/// dt <= τ_c/50 and dt <= τ/(50(n+1)).
std::size_t phase_grid_steps(const PulseSequence& seq, double tau_c, std::size_t min_L = 1);

/// Samples Φ = ∫ s(t) f(t) dt over `trials` noise paths (midpoint rule, pulse
/// instants on grid boundaries) and returns χ = Var(Φ)/4 per qubit.
McEstimate estimate_chi(const NoiseSpectrum& spec, const PulseSequence& seq, std::size_t trials,
                        std::uint64_t seed, const McOptions& opt = {});

}  // namespace ddm
