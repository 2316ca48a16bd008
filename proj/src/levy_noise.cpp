#include "lkr/levy_noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lkr/errors.hpp"

namespace lkr {

namespace {

// Beyond this many steps the inverse-CDF walk hands over to bisection on the
// closed-form survival function.
constexpr std::uint64_t kWalkLimit = 1u << 16;

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("Levy exponent alpha must be positive and finite, got " +
                          std::to_string(alpha));
}

// log Gamma(x) - log Gamma(x + a) for large x.
double log_gamma_ratio_asymptotic(double x, double a) {
    const double inv = 1.0 / x;
    return -(a * std::log(x) + a * (a - 1.0) * 0.5 * inv -
             a * (a - 1.0) * (2.0 * a - 1.0) / 12.0 * inv * inv);
}

double log_survival(double alpha, double tau) {
    if (tau < 1.0e6)
        return std::lgamma(tau + 1.0) + std::lgamma(alpha + 1.0) - std::lgamma(tau + alpha + 1.0);
    return std::lgamma(alpha + 1.0) + log_gamma_ratio_asymptotic(tau + 1.0, alpha);
}

std::uint64_t tail_inverse(double alpha, double u, std::uint64_t lo, std::uint64_t cap) {
    const double tail = 1.0 - u;
    if (tail <= 0.0) return std::min(kUncapped, cap + 1);
    const double target = std::log(tail);

    std::uint64_t hi = std::min(kUncapped, cap);
    if (log_survival(alpha, static_cast<double>(hi)) > target)
        return hi == cap ? cap + 1 : kUncapped;
    // Invariant: S(lo) > tail >= S(hi).
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (log_survival(alpha, static_cast<double>(mid)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace

LevyParams::LevyParams(double alpha) : alpha_(alpha) { require_alpha(alpha); }

std::optional<double> LevyParams::mean_waiting_time() const {
    if (alpha_ > 1.0) return alpha_ / (alpha_ - 1.0);
    return std::nullopt;
}

double levy_pmf(const LevyParams& params, std::int64_t tau) {
    if (tau < 1) throw DomainError("waiting time must be >= 1, got " + std::to_string(tau));
    const double a = params.alpha();
    double w = a / (a + 1.0);
    for (std::int64_t k = 1; k < tau; ++k) w *= static_cast<double>(k) / (static_cast<double>(k) + a + 1.0);
    return w;
}

double levy_survival(const LevyParams& params, std::int64_t tau) {
    if (tau < 0) throw DomainError("survival argument must be >= 0, got " + std::to_string(tau));
    if (tau == 0) return 1.0;
    return std::exp(log_survival(params.alpha(), static_cast<double>(tau)));
}

std::uint64_t waiting_time_from_uniform(const LevyParams& params, double u, std::uint64_t cap) {
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("uniform draw must lie in (0, 1]");
    const double a = params.alpha();
    double w = a / (a + 1.0);
    double cdf = w;
    std::uint64_t tau = 1;
    while (cdf < u) {
        if (tau >= cap) return cap + 1;
        if (tau >= kWalkLimit) return tail_inverse(a, u, tau, cap);
        w *= static_cast<double>(tau) / (static_cast<double>(tau) + a + 1.0);
        ++tau;
        cdf += w;
    }
    return tau;
}

std::uint64_t sample_waiting_time(const LevyParams& params, Rng& rng, std::uint64_t cap) {
    return waiting_time_from_uniform(params, rng.uniform_pos(), cap);
}

void validate(const NoiseMode& mode) {
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, noise::Levy>) {
                require_alpha(m.alpha);
            } else if constexpr (std::is_same_v<M, noise::StationaryTiming>) {
                if (!(m.delta_max > 0.0 && m.delta_max < 1.0))
                    throw DomainError("delta_max must lie in (0, 1)");
            } else if constexpr (std::is_same_v<M, noise::Amplitude>) {
                if (!(m.eps_max > 0.0 && m.eps_max < 1.0))
                    throw DomainError("eps_max must lie in (0, 1)");
            }
        },
        mode);
}

int KickSchedule::kick_count() const {
    return static_cast<int>(std::count(mask.begin(), mask.end(), true));
}

std::vector<bool> mask_from_waits(std::span<const std::uint64_t> waits, int horizon) {
    if (horizon < 1) throw DomainError("horizon must be >= 1");
    std::vector<bool> mask(static_cast<std::size_t>(horizon), false);
    mask[0] = true;
    std::uint64_t n = 1;
    for (const auto tau : waits) {
        if (tau < 1) throw DomainError("waiting times must be >= 1");
        n += tau;
        if (n > static_cast<std::uint64_t>(horizon)) break;
        mask[n - 1] = true;
    }
    return mask;
}

KickSchedule build_schedule(const NoiseMode& mode, int horizon, std::uint64_t seed) {
    if (horizon < 1) throw DomainError("horizon must be >= 1, got " + std::to_string(horizon));
    validate(mode);

    const auto n = static_cast<std::size_t>(horizon);
    KickSchedule s{std::vector<bool>(n, true), std::vector<double>(n, 1.0),
                   std::vector<double>(n, 1.0), seed};
    Rng rng(seed);

    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, noise::Levy>) {
                const LevyParams params(m.alpha);
                std::vector<std::uint64_t> waits;
                std::uint64_t at = 1;
                const auto h = static_cast<std::uint64_t>(horizon);
                while (at <= h) {
                    const auto tau = sample_waiting_time(params, rng, h - at);
                    waits.push_back(tau);
                    at += tau;
                }
                s.mask = mask_from_waits(waits, horizon);
            } else if constexpr (std::is_same_v<M, noise::StationaryTiming>) {
                for (auto& d : s.durations) d = 1.0 + rng.symmetric(m.delta_max);
            } else if constexpr (std::is_same_v<M, noise::Amplitude>) {
                for (auto& a : s.amplitudes) a = 1.0 + rng.symmetric(m.eps_max);
            }
        },
        mode);
    return s;
}

}  // namespace lkr
