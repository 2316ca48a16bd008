#include "lkr/quantum_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "lkr/errors.hpp"
#include "lkr/parallel.hpp"

namespace lkr {

namespace {

using cplx = std::complex<double>;

// The FFTW planner is not thread safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Realizations are reduced in blocks of this size; it bounds memory and is
// independent of the worker count.
constexpr std::size_t kReductionBlock = 64;

struct Welford {
    std::vector<double> mean;
    std::vector<double> m2;
    std::size_t count = 0;

    explicit Welford(std::size_t n) : mean(n, 0.0), m2(n, 0.0) {}

    void add(const std::vector<double>& x) {
        ++count;
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = x[i] - mean[i];
            mean[i] += d * inv;
            m2[i] += d * (x[i] - mean[i]);
        }
    }

    std::vector<double> stddev() const {
        std::vector<double> s(mean.size(), 0.0);
        if (count < 2) return s;
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::sqrt(std::max(0.0, m2[i] / static_cast<double>(count - 1)));
        return s;
    }
};

MomentumProfile profile_of(const QuantumState& state, int time) {
    MomentumProfile prof;
    prof.time = time;
    const int M = state.grid_M();
    prof.p_values.reserve(state.size());
    prof.f.reserve(state.size());
    for (int m = -M; m <= M; ++m) {
        prof.p_values.push_back(m * state.hbar_s());
        prof.f.push_back(state.occupation(m));
    }
    return prof;
}

double wrap_beta(double b) {
    b -= std::floor(b + 0.5);
    return b >= 0.5 ? b - 1.0 : b;
}

}  // namespace

void SimConfig::validate() const {
    auto fail = [](const char* field, const std::string& msg) { throw ConfigError(field, msg); };
    if (!(K >= 0.0) || !std::isfinite(K)) fail("K", "kick strength must be finite and >= 0");
    if (!(hbar_s > 0.0) || !std::isfinite(hbar_s)) fail("hbar_s", "must be positive");
    if (grid_M < 1) fail("grid_M", "must be >= 1");
    if (horizon < 1) fail("horizon", "must be >= 1");
    if (ensemble_size < 1) fail("ensemble_size", "must be >= 1");
    if (!(initial_sigma_p > 0.0) || !std::isfinite(initial_sigma_p))
        fail("initial_sigma_p", "must be positive");
    if (!(beta_spread >= 0.0) || !std::isfinite(beta_spread)) fail("beta_spread", "must be >= 0");
    if (record_times.empty()) fail("record_times", "must not be empty");
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        fail("record_times", "must be sorted ascending");
    if (record_times.front() < 0 || record_times.back() > horizon)
        fail("record_times", "entries must lie in [0, horizon]");
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, noise::Levy>) {
                if (!(m.alpha > 0.0) || !std::isfinite(m.alpha)) fail("alpha", "must be positive");
            } else if constexpr (std::is_same_v<M, noise::StationaryTiming>) {
                if (!(m.delta_max > 0.0 && m.delta_max < 1.0)) fail("delta_max", "must lie in (0, 1)");
            } else if constexpr (std::is_same_v<M, noise::Amplitude>) {
                if (!(m.eps_max > 0.0 && m.eps_max < 1.0)) fail("eps_max", "must lie in (0, 1)");
            }
        },
        noise);
}

// ---------------------------------------------------------------------------

QuantumState::QuantumState(int grid_M, double hbar_s, double beta)
    : grid_M_(grid_M), hbar_s_(hbar_s), beta_(beta) {
    if (grid_M < 1) throw DomainError("grid_M must be >= 1");
    if (!(hbar_s > 0.0)) throw DomainError("hbar_s must be positive");
    if (!(beta >= -0.5 && beta < 0.5)) throw DomainError("beta must lie in [-0.5, 0.5)");
    amps_.assign(static_cast<std::size_t>(2 * grid_M + 1), cplx{0.0, 0.0});
}

double QuantumState::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double QuantumState::mean_momentum() const {
    double s = 0.0;
    for (int m = -grid_M_; m <= grid_M_; ++m) s += occupation(m) * momentum(m);
    return s;
}

double QuantumState::mean_p2() const {
    double s = 0.0;
    for (int m = -grid_M_; m <= grid_M_; ++m) {
        const double p = momentum(m);
        s += occupation(m) * p * p;
    }
    return s;
}

double QuantumState::boundary_occupation() const {
    return occupation(-grid_M_) + occupation(grid_M_);
}

QuantumState init_gaussian_state(const SimConfig& config, double beta) {
    if (!(config.initial_sigma_p > 0.0)) throw ConfigError("initial_sigma_p", "must be positive");
    QuantumState state(config.grid_M, config.hbar_s, beta);
    const double inv4s2 = 1.0 / (4.0 * config.initial_sigma_p * config.initial_sigma_p);
    double norm = 0.0;
    for (int m = -config.grid_M; m <= config.grid_M; ++m) {
        const double p = state.momentum(m);
        const double a = std::exp(-p * p * inv4s2);
        state.at(m) = a;
        norm += a * a;
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : state.amplitudes()) a *= scale;
    if (state.boundary_occupation() >= kBoundaryOccupationLimit)
        throw ConfigError("initial_sigma_p", "initial packet reaches the edge of the momentum grid; "
                                             "increase grid_M or reduce initial_sigma_p");
    return state;
}

// ---------------------------------------------------------------------------

struct FloquetPropagator::Impl {
    int M;
    double hbar_s;
    int L;
    fftw_complex* buf = nullptr;
    fftw_plan to_position = nullptr;
    fftw_plan to_momentum = nullptr;
    std::vector<double> cos_x;
    std::vector<cplx> kick_phase;
    double kick_K = std::numeric_limits<double>::quiet_NaN();
    std::vector<cplx> free_phase;
    double free_duration = std::numeric_limits<double>::quiet_NaN();
    double free_beta = std::numeric_limits<double>::quiet_NaN();

    Impl(int grid_M, double hs) : M(grid_M), hbar_s(hs) {
        L = static_cast<int>(std::bit_ceil(static_cast<unsigned>(2 * (2 * M + 1))));
        buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(L)));
        {
            std::lock_guard lock(planner_mutex());
            to_position = fftw_plan_dft_1d(L, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
            to_momentum = fftw_plan_dft_1d(L, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        cos_x.resize(static_cast<std::size_t>(L));
        for (int j = 0; j < L; ++j) cos_x[static_cast<std::size_t>(j)] = std::cos(2.0 * std::numbers::pi * j / L);
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(to_position);
        fftw_destroy_plan(to_momentum);
        fftw_free(buf);
    }
};

FloquetPropagator::FloquetPropagator(int grid_M, double hbar_s)
    : impl_(std::make_unique<Impl>(grid_M, hbar_s)) {}

FloquetPropagator::~FloquetPropagator() = default;

int FloquetPropagator::position_points() const noexcept { return impl_->L; }

void FloquetPropagator::kick(QuantumState& state, double effective_K) {
    auto& d = *impl_;
    if (state.grid_M() != d.M || state.hbar_s() != d.hbar_s)
        throw DomainError("state grid does not match propagator");
    if (!(effective_K >= 0.0)) throw DomainError("effective kick strength must be >= 0");
    if (effective_K == 0.0) return;

    if (effective_K != d.kick_K) {
        d.kick_phase.resize(static_cast<std::size_t>(d.L));
        const double c = effective_K / d.hbar_s;
        const double inv_L = 1.0 / d.L;
        for (std::size_t j = 0; j < d.kick_phase.size(); ++j)
            d.kick_phase[j] = std::polar(inv_L, -c * d.cos_x[j]);
        d.kick_K = effective_K;
    }

    auto* b = reinterpret_cast<cplx*>(d.buf);
    std::fill(b, b + d.L, cplx{0.0, 0.0});
    for (int m = -d.M; m <= d.M; ++m) b[(m + d.L) % d.L] = state.at(m);
    fftw_execute(d.to_position);
    for (int j = 0; j < d.L; ++j) b[j] *= d.kick_phase[static_cast<std::size_t>(j)];
    fftw_execute(d.to_momentum);
    for (int m = -d.M; m <= d.M; ++m) state.at(m) = b[(m + d.L) % d.L];
}

void FloquetPropagator::free_evolve(QuantumState& state, double duration) {
    auto& d = *impl_;
    if (state.grid_M() != d.M || state.hbar_s() != d.hbar_s)
        throw DomainError("state grid does not match propagator");
    if (!(duration > 0.0)) throw DomainError("free-evolution duration must be positive");

    if (duration != d.free_duration || state.beta() != d.free_beta) {
        d.free_phase.resize(state.size());
        for (int m = -d.M; m <= d.M; ++m) {
            const double mb = m + state.beta();
            d.free_phase[static_cast<std::size_t>(m + d.M)] = std::polar(1.0, -0.5 * d.hbar_s * mb * mb * duration);
        }
        d.free_duration = duration;
        d.free_beta = state.beta();
    }
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= d.free_phase[i];
}

QuantumState apply_kick(QuantumState state, double effective_K) {
    FloquetPropagator prop(state.grid_M(), state.hbar_s());
    prop.kick(state, effective_K);
    return state;
}

QuantumState free_evolve(QuantumState state, double duration) {
    FloquetPropagator prop(state.grid_M(), state.hbar_s());
    prop.free_evolve(state, duration);
    return state;
}

// ---------------------------------------------------------------------------

TrajectoryRecord evolve_trajectory(const SimConfig& config, const KickSchedule& schedule, double beta) {
    if (schedule.horizon() != config.horizon)
        throw DomainError("schedule horizon " + std::to_string(schedule.horizon()) +
                          " does not match config horizon " + std::to_string(config.horizon));

    QuantumState state = init_gaussian_state(config, beta);
    FloquetPropagator prop(config.grid_M, config.hbar_s);

    TrajectoryRecord rec;
    const auto N = static_cast<std::size_t>(config.horizon);
    rec.energy.reserve(N + 1);
    rec.f0.reserve(N + 1);
    rec.profiles.reserve(config.record_times.size());
    auto next_profile = config.record_times.begin();

    auto observe = [&](int t) {
        rec.energy.push_back(state.energy());
        rec.f0.push_back(state.occupation(0));
        while (next_profile != config.record_times.end() && *next_profile == t) {
            rec.profiles.push_back(profile_of(state, t));
            ++next_profile;
        }
    };

    observe(0);
    for (std::size_t i = 0; i < N; ++i) {
        if (schedule.mask[i]) prop.kick(state, config.K * schedule.amplitudes[i]);
        prop.free_evolve(state, schedule.durations[i]);
        const int period = static_cast<int>(i) + 1;
        const double edge = state.boundary_occupation();
        if (edge >= kBoundaryOccupationLimit) throw GridOverflowError(period, edge);
        observe(period);
    }
    return rec;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t r) {
    return derive_seed(master_seed, r);
}

double realization_beta(const SimConfig& config, std::size_t r) {
    if (config.beta_spread == 0.0) return 0.0;
    Rng rng(derive_seed(realization_seed(config.master_seed, r), 0xBE7AULL));
    return wrap_beta(config.beta_spread * rng.normal());
}

EnsembleResult ensemble_run(const SimConfig& config, int workers) {
    config.validate();
    const auto n = static_cast<std::size_t>(config.ensemble_size);
    const auto T = static_cast<std::size_t>(config.horizon) + 1;

    EnsembleResult out;
    out.seeds.resize(n);
    for (std::size_t r = 0; r < n; ++r) out.seeds[r] = realization_seed(config.master_seed, r);

    Welford energy(T), f0(T);
    std::vector<MomentumProfile> profile_sum;

    std::vector<TrajectoryRecord> block;
    for (std::size_t start = 0; start < n; start += kReductionBlock) {
        const std::size_t len = std::min(kReductionBlock, n - start);
        block.assign(len, {});
        parallel_for(len, workers, [&](std::size_t i) {
            const std::size_t r = start + i;
            const auto schedule = build_schedule(config.noise, config.horizon, out.seeds[r]);
            try {
                block[i] = evolve_trajectory(config, schedule, realization_beta(config, r));
            } catch (const GridOverflowError& e) {
                throw e.with_realization(r);
            }
        });
        for (auto& rec : block) {
            energy.add(rec.energy);
            f0.add(rec.f0);
            if (profile_sum.empty()) {
                profile_sum = std::move(rec.profiles);
            } else {
                for (std::size_t k = 0; k < profile_sum.size(); ++k)
                    for (std::size_t j = 0; j < profile_sum[k].f.size(); ++j)
                        profile_sum[k].f[j] += rec.profiles[k].f[j];
            }
        }
    }

    out.energy.times.resize(T);
    for (std::size_t t = 0; t < T; ++t) out.energy.times[t] = static_cast<int>(t);
    out.energy.mean_E = energy.mean;
    out.energy.std_E = energy.stddev();
    out.energy.n_realizations = config.ensemble_size;

    out.f0.times = out.energy.times;
    out.f0.mean = f0.mean;
    out.f0.std = f0.stddev();

    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& p : profile_sum)
        for (auto& v : p.f) v *= inv_n;
    out.profiles = std::move(profile_sum);
    return out;
}

}  // namespace lkr
