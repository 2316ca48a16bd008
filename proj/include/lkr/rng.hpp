#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lkr {

/// SplitMix64 finalizer; used to fold stream indices into seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` under `master`. Depends only on the pair, never on
/// scheduling, so ensembles are reproducible for any worker count.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Deterministic generator. mt19937_64 is fully specified by the standard, and
/// the conversions below avoid the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform on [-width, width].
    double symmetric(double width) { return width * (2.0 * uniform() - 1.0); }

    /// Standard normal by Box-Muller (one variate per call).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lkr
