#include "lkr/classical_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lkr/errors.hpp"
#include "lkr/parallel.hpp"
#include "lkr/rng.hpp"

namespace lkr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kBlock = 1024;

double wrap_angle(double x) {
    x = std::fmod(x, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    return x >= kTwoPi ? 0.0 : x;
}

}  // namespace

ClassicalState map_step(ClassicalState s, double effective_K) {
    s.p += effective_K * std::sin(s.x);
    s.x = wrap_angle(s.x + s.p);
    return s;
}

ClassicalState free_rotate(ClassicalState s, double duration) {
    s.x = wrap_angle(s.x + s.p * duration);
    return s;
}

double largest_lyapunov(double K, ClassicalState start, int steps) {
    if (steps < 1) throw DomainError("Lyapunov estimate needs at least one step");
    // Tangent map of (x, p) -> (x + p + K sin x, p + K sin x).
    double dx = 1.0, dp = 0.0, log_growth = 0.0;
    ClassicalState s = start;
    for (int n = 0; n < steps; ++n) {
        const double c = K * std::cos(s.x);
        const double ndp = dp + c * dx;
        const double ndx = dx + ndp;
        const double len = std::hypot(ndx, ndp);
        log_growth += std::log(len);
        dx = ndx / len;
        dp = ndp / len;
        s = map_step(s, K);
    }
    return log_growth / steps;
}

void ClassicalEnsembleConfig::validate() const {
    if (!(K >= 0.0) || !std::isfinite(K)) throw ConfigError("K", "kick strength must be finite and >= 0");
    if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
    if (n_particles < 1) throw ConfigError("n_particles", "must be >= 1");
    if (!(sigma_p >= 0.0)) throw ConfigError("classical_sigma_p", "must be >= 0");
    if (section_particles < 0) throw ConfigError("section_particles", "must be >= 0");
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw ConfigError("record_times", "must be sorted ascending");
    if (!record_times.empty() && (record_times.front() < 0 || record_times.back() > horizon))
        throw ConfigError("record_times", "entries must lie in [0, horizon]");
    try {
        lkr::validate(noise);
    } catch (const DomainError& e) {
        throw ConfigError("noise", e.what());
    }
}

ClassicalResult classical_ensemble(const ClassicalEnsembleConfig& config, int workers) {
    config.validate();
    const auto n = static_cast<std::size_t>(config.n_particles);
    const auto T = static_cast<std::size_t>(config.horizon) + 1;

    struct Track {
        std::vector<double> energy;
        std::vector<SectionPoint> section;
    };

    std::vector<double> mean(T, 0.0), m2(T, 0.0);
    std::size_t count = 0;
    ClassicalResult out;

    std::vector<Track> block;
    for (std::size_t start = 0; start < n; start += kBlock) {
        const std::size_t len = std::min(kBlock, n - start);
        block.assign(len, {});
        parallel_for(len, workers, [&](std::size_t i) {
            const std::size_t idx = start + i;
            const std::uint64_t seed = derive_seed(config.master_seed, idx);
            const auto sched = build_schedule(config.noise, config.horizon, seed);
            Rng rng(derive_seed(seed, 0xC1A5ULL));
            ClassicalState s{kTwoPi * rng.uniform(), config.sigma_p * rng.normal()};

            const bool in_section = idx < static_cast<std::size_t>(config.section_particles);
            auto rt = config.record_times.begin();
            Track& tr = block[i];
            tr.energy.resize(T);
            auto record = [&](int t) {
                tr.energy[static_cast<std::size_t>(t)] = 0.5 * s.p * s.p;
                for (; rt != config.record_times.end() && *rt == t; ++rt)
                    if (in_section) tr.section.push_back({s.x, s.p, t});
            };
            record(0);
            for (int k = 0; k < config.horizon; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                if (sched.mask[ku]) s.p += config.K * sched.amplitudes[ku] * std::sin(s.x);
                s = free_rotate(s, sched.durations[ku]);
                record(k + 1);
            }
        });
        for (auto& tr : block) {
            ++count;
            const double inv = 1.0 / static_cast<double>(count);
            for (std::size_t t = 0; t < T; ++t) {
                const double d = tr.energy[t] - mean[t];
                mean[t] += d * inv;
                m2[t] += d * (tr.energy[t] - mean[t]);
            }
            out.section.insert(out.section.end(), tr.section.begin(), tr.section.end());
        }
    }

    out.energy.times.resize(T);
    out.energy.std_E.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        out.energy.times[t] = static_cast<int>(t);
        if (count > 1) out.energy.std_E[t] = std::sqrt(std::max(0.0, m2[t] / static_cast<double>(count - 1)));
    }
    out.energy.mean_E = std::move(mean);
    out.energy.n_realizations = config.n_particles;
    return out;
}

}  // namespace lkr
