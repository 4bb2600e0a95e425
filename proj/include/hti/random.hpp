#pragma once

#include <cstdint>
#include <random>

namespace hti {

/// SplitMix64 finalizer; bit-exact on every platform.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// Seed of the r-th child stream of `master`: mix64(master + (r + 1) * golden).
/// Streams for different r are statistically independent for simulation purposes.
[[nodiscard]] constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t r) noexcept {
    return mix64(master + (r + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Per-replication source of primitive draws. Not shared between threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11U) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hti
