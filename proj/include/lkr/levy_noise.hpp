#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "lkr/rng.hpp"

namespace lkr {

/// Exponent of the discrete waiting-time law
///   w(tau) = alpha Gamma(tau) Gamma(alpha+1) / Gamma(tau+alpha+1),  tau = 1, 2, ...
/// whose tail falls off as tau^(-alpha-1).
class LevyParams {
public:
    explicit LevyParams(double alpha);

    double alpha() const noexcept { return alpha_; }

    /// Power-law classification of the first moment: true iff alpha < 1.
    bool mean_diverges() const noexcept { return alpha_ < 1.0; }

    /// alpha / (alpha - 1) for alpha > 1. Empty otherwise (alpha = 1 diverges
    /// logarithmically).
    std::optional<double> mean_waiting_time() const;

private:
    double alpha_;
};

/// w(tau), evaluated with the ratio recursion w(tau+1) = w(tau) tau / (tau+alpha+1).
double levy_pmf(const LevyParams& params, std::int64_t tau);

/// P(waiting time > tau) = Gamma(tau+1) Gamma(alpha+1) / Gamma(tau+alpha+1).
double levy_survival(const LevyParams& params, std::int64_t tau);

inline constexpr std::uint64_t kUncapped = std::numeric_limits<std::uint64_t>::max() / 2;

/// Smallest tau with CDF(tau) >= u, for u in (0, 1]. The walk stops early once
/// tau exceeds `cap` and returns cap + 1; callers that only care whether a wait
/// overruns a horizon pass the remaining horizon. With the default cap the
/// result is exact (saturating at kUncapped).
std::uint64_t waiting_time_from_uniform(const LevyParams& params, double u,
                                        std::uint64_t cap = kUncapped);

std::uint64_t sample_waiting_time(const LevyParams& params, Rng& rng,
                                  std::uint64_t cap = kUncapped);

namespace noise {

struct Periodic {};

struct Levy {
    double alpha;
};

/// Kick period T + delta, delta uniform on [-delta_max, delta_max] (fraction of T).
struct StationaryTiming {
    double delta_max;
};

/// Kick strength K (1 + eps), eps uniform on [-eps_max, eps_max].
struct Amplitude {
    double eps_max;
};

}  // namespace noise

using NoiseMode =
    std::variant<noise::Periodic, noise::Levy, noise::StationaryTiming, noise::Amplitude>;

/// Throws DomainError when the mode's parameter is out of range.
void validate(const NoiseMode& mode);

/// Realized noise of one run over periods n = 1..N (index n-1).
struct KickSchedule {
    std::vector<bool> mask;           ///< true where the kick is applied (g_n = 0)
    std::vector<double> durations;    ///< free-evolution length per period, in periods
    std::vector<double> amplitudes;   ///< kick-strength factor per period
    std::uint64_t seed = 0;

    int horizon() const noexcept { return static_cast<int>(mask.size()); }
    int kick_count() const;

    bool operator==(const KickSchedule&) const = default;
};

KickSchedule build_schedule(const NoiseMode& mode, int horizon, std::uint64_t seed);

/// Mask with a kick at n = 1 followed by kicks after each of `waits`, truncated
/// at the horizon. This is the construction build_schedule uses for Levy mode.
std::vector<bool> mask_from_waits(std::span<const std::uint64_t> waits, int horizon);

}  // namespace lkr
