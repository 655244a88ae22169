#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ddm {

/// Worker cap from DDMETRICS_THREADS, else the hardware concurrency.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DDMETRICS_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return hw;
}

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed exactly once; the first exception is rethrown after joining.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = worker_count()) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ddm
