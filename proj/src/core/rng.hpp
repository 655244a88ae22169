#pragma once

#include <cstdint>
#include <limits>

namespace ddm {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: output k is a keyed hash of k, so a stream is fully
/// determined by its key and independent streams come from distinct keys.
class CounterStream {
public:
    using result_type = std::uint64_t;

    constexpr CounterStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : key_(mix64(master_seed ^ mix64(stream_index ^ 0x6a09e667f3bcc909ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        return mix64(key_ + 0xd1b54a32d192ed03ULL * ++counter_);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ddm
