#include "mc_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <string>

#include "error.hpp"
#include "parallel.hpp"

namespace ddm {
namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

}  // namespace

struct GaussianPathSampler::Plan {
    explicit Plan(std::size_t n) : in(n), out(n) {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
        if (!plan) fail(Errc::invalid_argument, "FFT plan creation failed");
    }
    ~Plan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    FftwBuffer in, out;
    fftw_plan plan;
};

std::vector<double> sample_ou_path(double sigma, double tau_c, double dt, std::size_t steps, CounterStream& stream) {
    if (!(sigma >= 0.0) || !(tau_c > 0.0) || !(dt > 0.0))
        fail(Errc::invalid_argument, "OU sampler needs sigma >= 0, tau_c > 0, dt > 0");
    std::vector<double> path(steps, 0.0);
    if (sigma == 0.0 || steps == 0) return path;
    std::normal_distribution<double> normal;
    const double decay = std::exp(-dt / tau_c);
    const double kick = sigma * std::sqrt(-std::expm1(-2.0 * dt / tau_c));
    double x = sigma * normal(stream);
    path[0] = x;
    for (std::size_t k = 1; k < steps; ++k) {
        x = x * decay + kick * normal(stream);
        path[k] = x;
    }
    return path;
}

GaussianPathSampler::GaussianPathSampler(double sigma, double tau_c, double dt, std::size_t steps)
    : sigma_(sigma), steps_(steps), size_(2 * steps) {
    if (!(sigma >= 0.0) || !(tau_c > 0.0) || !(dt > 0.0) || steps < 2)
        fail(Errc::invalid_argument, "gaussian sampler needs sigma >= 0, tau_c > 0, dt > 0, steps >= 2");
    if (steps * dt < 10.0 * tau_c)
        fail(Errc::invalid_argument, "circulant embedding needs a record of at least 10 tau_c");
    plan_ = std::make_unique<Plan>(size_);
    for (std::size_t j = 0; j < size_; ++j) {
        const double lag = static_cast<double>(std::min(j, size_ - j)) * dt / tau_c;
        plan_->in.data[j][0] = std::exp(-0.5 * lag * lag);
        plan_->in.data[j][1] = 0.0;
    }
    fftw_execute(plan_->plan);
    double peak = 0.0;
    for (std::size_t j = 0; j < size_; ++j) peak = std::max(peak, plan_->out.data[j][0]);
    sqrt_weights_.resize(size_);
    for (std::size_t j = 0; j < size_; ++j) {
        const double lambda = plan_->out.data[j][0];
        if (lambda < -1e-10 * peak)
            fail(Errc::invalid_argument, "circulant embedding has negative spectral weights; increase record length");
        sqrt_weights_[j] = sigma * std::sqrt(std::max(0.0, lambda) / static_cast<double>(size_));
    }
}

GaussianPathSampler::~GaussianPathSampler() = default;

std::pair<std::vector<double>, std::vector<double>> GaussianPathSampler::sample_pair(CounterStream& stream) const {
    std::pair<std::vector<double>, std::vector<double>> paths{std::vector<double>(steps_, 0.0),
                                                               std::vector<double>(steps_, 0.0)};
    if (sigma_ == 0.0) return paths;
    FftwBuffer in(size_), out(size_);
    std::normal_distribution<double> normal;
    for (std::size_t j = 0; j < size_; ++j) {
        in.data[j][0] = sqrt_weights_[j] * normal(stream);
        in.data[j][1] = sqrt_weights_[j] * normal(stream);
    }
    fftw_execute_dft(plan_->plan, in.data, out.data);
    for (std::size_t k = 0; k < steps_; ++k) {
        paths.first[k] = out.data[k][0];
        paths.second[k] = out.data[k][1];
    }
    return paths;
}

std::vector<double> sample_gaussian_spectrum_path(double sigma, double tau_c, double dt, std::size_t steps,
                                                  CounterStream& stream) {
    GaussianPathSampler sampler(sigma, tau_c, dt, steps);
    return sampler.sample_pair(stream).first;
}

int toggling_sign(double t, const PulseSequence& seq) {
    if (!(t >= 0.0 && t <= seq.tau())) fail(Errc::domain, "toggling sign is defined on [0, tau]");
    const int n = seq.pulses();
    if (n == 0) return 1;
    const double flips = std::floor(t * n / seq.tau() + 0.5);
    const int count = static_cast<int>(std::clamp(flips, 0.0, double(n)));
    return count % 2 == 0 ? 1 : -1;
}

std::size_t phase_grid_steps(const PulseSequence& seq, double tau_c, std::size_t min_L) {
    const int n = seq.pulses();
    const double ratio = tau_c > 0.0 ? seq.tau() / tau_c : 0.0;
    if (n == 0) {
        const double m = std::max({double(min_L), 50.0, std::ceil(50.0 * ratio)});
        return static_cast<std::size_t>(m);
    }
    const double half_segments = 2.0 * n;
    const double L = std::max({double(min_L), std::ceil(50.0 * (n + 1) / half_segments),
                               std::ceil(50.0 * ratio / half_segments)});
    return static_cast<std::size_t>(L * half_segments);
}

McEstimate estimate_chi(const NoiseSpectrum& spec, const PulseSequence& seq, std::size_t trials,
                        std::uint64_t seed, const McOptions& opt) {
    const auto* lor = std::get_if<Lorentzian>(&spec.model());
    const auto* gau = std::get_if<GaussianSpectrum>(&spec.model());
    if (!lor && !gau) fail(Errc::invalid_argument, "Monte Carlo oracle supports lorentzian and gaussian spectra");
    if (trials < 2) fail(Errc::invalid_argument, "Monte Carlo needs at least 2 trials");
    const double sigma = lor ? lor->sigma : gau->sigma;
    const double tau_c = lor ? lor->tau_c : gau->tau_c;

    McEstimate est;
    est.trials = trials;
    est.steps = phase_grid_steps(seq, tau_c, opt.min_steps_per_half_segment);
    est.dt = seq.tau() / static_cast<double>(est.steps);
    if (sigma == 0.0) {
        est.mean_cos = 1.0;
        return est;
    }

    const std::size_t steps = est.steps;
    const double dt = est.dt;
    std::vector<double> sign(steps);
    for (std::size_t k = 0; k < steps; ++k) sign[k] = toggling_sign((k + 0.5) * dt, seq);
    auto accumulate = [&](const double* f) {
        double phi = 0.0;
        for (std::size_t k = 0; k < steps; ++k) phi += sign[k] * f[k];
        return phi * dt;
    };

    const unsigned workers = opt.workers ? opt.workers : worker_count();
    std::vector<double> phase(trials);
    if (lor) {
        constexpr std::size_t kChunk = 256;
        parallel_for(
            (trials + kChunk - 1) / kChunk,
            [&](std::size_t c) {
                const std::size_t end = std::min(trials, (c + 1) * kChunk);
                for (std::size_t i = c * kChunk; i < end; ++i) {
                    CounterStream stream(seed, i);
                    // Samples sit at the cell midpoints (k + 1/2) dt.
                    const auto path = sample_ou_path(sigma, tau_c, dt, steps, stream);
                    phase[i] = accumulate(path.data());
                }
            },
            workers);
    } else {
        // Windows of `steps` samples cut from one long record, separated by a
        // 4 τ_c gap; the Gaussian correlation across the gap is e^{-8}.
        const auto gap = static_cast<std::size_t>(std::ceil(4.0 * tau_c / dt));
        const std::size_t window = steps + gap;
        const auto min_record = static_cast<std::size_t>(std::ceil(10.0 * tau_c / dt));
        const std::size_t per_record = std::max<std::size_t>(1, (min_record + window - 1) / window);
        const std::size_t record = std::max(per_record * window, min_record);
        const std::size_t per_block = 2 * per_record;
        const std::size_t blocks = (trials + per_block - 1) / per_block;
        GaussianPathSampler sampler(sigma, tau_c, dt, record);
        parallel_for(
            blocks,
            [&](std::size_t b) {
                CounterStream stream(seed, b);
                const auto [re, im] = sampler.sample_pair(stream);
                for (std::size_t part = 0; part < 2; ++part) {
                    const auto& path = part == 0 ? re : im;
                    for (std::size_t w = 0; w < per_record; ++w) {
                        const std::size_t i = b * per_block + part * per_record + w;
                        if (i >= trials) return;
                        phase[i] = accumulate(path.data() + w * window);
                    }
                }
            },
            workers);
    }

    auto variance_of = [&](auto&& index) {
        double mean = 0.0;
        for (std::size_t i = 0; i < trials; ++i) mean += phase[index(i)];
        mean /= double(trials);
        double ss = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const double d = phase[index(i)] - mean;
            ss += d * d;
        }
        return ss / double(trials - 1);
    };
    est.phase_variance = variance_of([](std::size_t i) { return i; });
    est.chi = est.phase_variance / 4.0;
    double cos_sum = 0.0;
    for (double p : phase) cos_sum += std::cos(p);
    est.mean_cos = cos_sum / double(trials);

    const std::size_t resamples = std::max<std::size_t>(2, opt.bootstrap_resamples);
    CounterStream boot(seed ^ 0xb5ad4eceda1ce2a9ULL, trials);
    std::vector<std::size_t> pick(trials);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
        for (auto& p : pick) p = static_cast<std::size_t>(boot() % trials);
        const double c = variance_of([&](std::size_t i) { return pick[i]; }) / 4.0;
        m1 += c;
        m2 += c * c;
    }
    m1 /= double(resamples);
    est.stderr = std::sqrt(std::max(0.0, m2 / double(resamples) - m1 * m1) * double(resamples) / double(resamples - 1));
    est.low_confidence = est.stderr > 0.2 * est.chi || trials < kMinConfidentTrials;
    return est;
}

}  // namespace ddm
