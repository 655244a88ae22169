#include "general_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace ddm {
namespace {

void check_qubits(int qubits, bool dense) {
    if (qubits < 1) fail(Errc::invalid_argument, "qubit count must be >= 1");
    if (dense && qubits > kMaxDenseQubits)
        fail(Errc::capacity, "dense states are limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    if (dense && qubits > 62) fail(Errc::capacity, "basis index exceeds 64 bits");
}

struct Weights {
    std::vector<double> w;
    std::vector<int> count;
};

Weights dense_weights(const ProbeState::Dense& d) {
    Weights out;
    out.w.resize(d.amplitudes.size());
    out.count.resize(d.amplitudes.size());
    for (std::size_t x = 0; x < d.amplitudes.size(); ++x) {
        out.w[x] = std::norm(d.amplitudes[x]);
        out.count[x] = std::popcount(static_cast<std::uint64_t>(x));
    }
    return out;
}

// Σ_x Σ_y w_x w_y term(x, y). Rows are summed in fixed blocks and the block
// totals combined in order, so the result does not depend on the worker count.
template <class Term>
double pair_sum(const Weights& wt, Term&& term) {
    const std::size_t dim = wt.w.size();
    constexpr std::size_t kBlock = 64;
    const std::size_t blocks = (dim + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
        double acc = 0.0;
        const std::size_t end = std::min(dim, (b + 1) * kBlock);
        for (std::size_t x = b * kBlock; x < end; ++x) {
            if (wt.w[x] == 0.0) continue;
            double row = 0.0;
            for (std::size_t y = 0; y < dim; ++y) {
                if (wt.w[y] == 0.0) continue;
                row += wt.w[y] * term(x, y);
            }
            acc += wt.w[x] * row;
        }
        partial[b] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace

ProbeState ProbeState::dense(int qubits, std::vector<std::complex<double>> amplitudes) {
    check_qubits(qubits, true);
    if (amplitudes.size() != (std::size_t{1} << qubits))
        fail(Errc::invalid_argument, "dense state needs 2^N amplitudes");
    double norm = 0.0;
    for (const auto& a : amplitudes) norm += std::norm(a);
    if (std::abs(norm - 1.0) > 1e-12) fail(Errc::invalid_argument, "state is not normalized");
    return ProbeState(Dense{qubits, std::move(amplitudes)});
}

ProbeState ProbeState::ghz(int qubits) {
    check_qubits(qubits, false);
    return ProbeState(Ghz{qubits});
}

ProbeState ProbeState::product_plus(int qubits) {
    check_qubits(qubits, true);
    const std::size_t dim = std::size_t{1} << qubits;
    return dense(qubits, std::vector<std::complex<double>>(dim, 1.0 / std::sqrt(double(dim))));
}

ProbeState ProbeState::basis(int qubits, std::uint64_t index) {
    check_qubits(qubits, true);
    const std::size_t dim = std::size_t{1} << qubits;
    if (index >= dim) fail(Errc::invalid_argument, "basis index out of range");
    std::vector<std::complex<double>> a(dim, 0.0);
    a[index] = 1.0;
    return dense(qubits, std::move(a));
}

int ProbeState::qubits() const noexcept {
    return std::visit([](const auto& r) { return r.qubits; }, repr_);
}

std::vector<std::complex<double>> ProbeState::amplitudes() const {
    if (auto* d = as_dense()) return d->amplitudes;
    const int n = qubits();
    check_qubits(n, true);
    std::vector<std::complex<double>> a(std::size_t{1} << n, 0.0);
    a.front() = a.back() = 1.0 / std::numbers::sqrt2;
    return a;
}

int excitation_count(std::uint64_t x, int qubits) {
    if (qubits < 0 || qubits > 63 || (qubits < 64 && (x >> qubits) != 0))
        fail(Errc::invalid_argument, "basis index out of range for the register");
    return std::popcount(x);
}

GeneratorMoments generator_moments(const ProbeState& state) {
    const double n = state.qubits();
    if (state.is_ghz()) return {0.0, n * n, n * n / 2.0};
    const Weights wt = dense_weights(*state.as_dense());
    GeneratorMoments m;
    double mean_c = 0.0;
    for (std::size_t x = 0; x < wt.w.size(); ++x) {
        mean_c += wt.count[x] * wt.w[x];
        const double h = 2.0 * wt.count[x] - n;
        m.second += h * h * wt.w[x];
    }
    m.mean = 2.0 * mean_c - n;
    m.kappa = pair_sum(wt, [&](std::size_t x, std::size_t y) {
        const double d = wt.count[x] - wt.count[y];
        return d * d;
    });
    return m;
}

double probability_coherent(const ProbeState& state, double phi) {
    if (state.is_ghz()) return 0.5 + 0.5 * std::cos(state.qubits() * phi);
    const Weights wt = dense_weights(*state.as_dense());
    return pair_sum(wt, [&](std::size_t x, std::size_t y) { return std::cos((wt.count[y] - wt.count[x]) * phi); });
}

double probability_decohered(const ProbeState& state, double phi, double alpha_rate, double tau) {
    if (!(alpha_rate >= 0.0)) fail(Errc::invalid_argument, "decoherence rate must be non-negative");
    const double rate = alpha_rate * std::pow(tau, 6);
    if (state.is_ghz()) {
        const int n = state.qubits();
        return 0.5 + 0.5 * std::cos(n * phi) * std::exp(-2.0 * n * rate);
    }
    const Weights wt = dense_weights(*state.as_dense());
    const int n = state.qubits();
    std::vector<double> damping(static_cast<std::size_t>(n) + 1);
    for (int c = 0; c <= n; ++c) damping[c] = std::exp(-2.0 * c * rate);
    return pair_sum(wt, [&](std::size_t x, std::size_t y) {
        return std::cos((wt.count[y] - wt.count[x]) * phi) * damping[std::popcount(x ^ y)];
    });
}

double decoherence_weight(const ProbeState& state, double alpha_rate, double tau) {
    const double rate = 2.0 * alpha_rate * std::pow(tau, 6);
    if (state.is_ghz()) return rate * state.qubits() / 2.0;
    const Weights wt = dense_weights(*state.as_dense());
    return rate * pair_sum(wt, [](std::size_t x, std::size_t y) { return double(std::popcount(x ^ y)); });
}

double bound_coherent(const ProbeState& state, double tau, double repetitions) {
    const double kappa = generator_moments(state).kappa;
    if (!(kappa > 0.0)) fail(Errc::generator_insensitive, "generator-insensitive state (kappa = 0)");
    const double pi = std::numbers::pi;
    return std::sqrt(pi * pi / (32.0 * tau * tau * repetitions * kappa));
}

double bound_decohered(const ProbeState& state, double tau, double repetitions, double alpha_rate, double theta) {
    const double kappa = generator_moments(state).kappa;
    if (!(kappa > 0.0)) fail(Errc::generator_insensitive, "generator-insensitive state (kappa = 0)");
    if (!(theta > 0.0)) fail(Errc::invalid_argument, "bias theta must be positive");
    const double xi = 2.0 * alpha_rate * std::pow(tau, 6) * state.qubits();
    const double slope = 4.0 * tau / std::numbers::pi;
    return std::sqrt((theta * theta * kappa / 2.0 + xi) /
                     (repetitions * theta * theta * kappa * kappa * slope * slope));
}

ProbeState load_state_csv(const std::string& path, int qubits) {
    check_qubits(qubits, true);
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open state file: " + path);
    const std::size_t dim = std::size_t{1} << qubits;
    std::vector<std::complex<double>> a(dim, 0.0);
    std::string line;
    std::size_t lineno = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        long long x = 0;
        double re = 0, im = 0;
        std::string extra;
        if (!(row >> x >> re >> im) || (row >> extra)) {
            if (lineno == 1 && !any) continue;  // header
            fail(Errc::io, path + ":" + std::to_string(lineno) + ": expected x, Re a_x, Im a_x");
        }
        if (x < 0 || static_cast<std::size_t>(x) >= dim)
            fail(Errc::io, path + ":" + std::to_string(lineno) + ": basis index out of range");
        a[static_cast<std::size_t>(x)] = {re, im};
        any = true;
    }
    double norm = 0.0;
    for (const auto& v : a) norm += std::norm(v);
    if (std::abs(norm - 1.0) > 1e-8)
        fail(Errc::invalid_argument, "state norm " + std::to_string(norm) + " deviates from 1 by more than 1e-8");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& v : a) v *= scale;
    // Renormalization leaves |norm - 1| at rounding level.
    double check = 0.0;
    for (const auto& v : a) check += std::norm(v);
    if (std::abs(check - 1.0) > 1e-12) fail(Errc::invalid_argument, "state could not be renormalized");
    return ProbeState::dense(qubits, std::move(a));
}

}  // namespace ddm
