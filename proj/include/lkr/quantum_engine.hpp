#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lkr/levy_noise.hpp"

namespace lkr {

/// All physical and numerical parameters of a kicked-rotor run. Momentum is in
/// scaled units where the ladder spacing is hbar_s; time is in kick periods.
struct SimConfig {
    double K = 5.8;
    double hbar_s = 2.09;
    int grid_M = 256;  ///< momentum ladder m in [-grid_M, grid_M]
    int horizon = 100;
    NoiseMode noise = noise::Periodic{};
    int ensemble_size = 1;
    std::uint64_t master_seed = 1;
    double initial_sigma_p = 3.0;
    double beta_spread = 0.0;  ///< std of Gaussian quasi-momentum spread; 0 = pure rotor
    std::vector<int> record_times{0};

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

/// Largest tolerated |a_-M|^2 + |a_M|^2.
inline constexpr double kBoundaryOccupationLimit = 1e-6;

class QuantumState {
public:
    QuantumState(int grid_M, double hbar_s, double beta = 0.0);

    int grid_M() const noexcept { return grid_M_; }
    double hbar_s() const noexcept { return hbar_s_; }
    double beta() const noexcept { return beta_; }
    std::size_t size() const noexcept { return amps_.size(); }

    std::complex<double>& at(int m) { return amps_[static_cast<std::size_t>(m + grid_M_)]; }
    const std::complex<double>& at(int m) const { return amps_[static_cast<std::size_t>(m + grid_M_)]; }
    std::span<std::complex<double>> amplitudes() noexcept { return amps_; }
    std::span<const std::complex<double>> amplitudes() const noexcept { return amps_; }

    double momentum(int m) const noexcept { return (m + beta_) * hbar_s_; }
    double occupation(int m) const { return std::norm(at(m)); }

    double norm() const;
    double mean_momentum() const;
    double mean_p2() const;
    double energy() const { return 0.5 * mean_p2(); }
    double boundary_occupation() const;

private:
    int grid_M_;
    double hbar_s_;
    double beta_;
    std::vector<std::complex<double>> amps_;
};

/// Gaussian wave packet centred at p = 0: a_m proportional to exp(-p_m^2 / (4 sigma^2)).
QuantumState init_gaussian_state(const SimConfig& config, double beta = 0.0);

/// Kick and free-evolution factors of the one-period map for a fixed grid.
/// The kick is applied on a position grid of L = bit_ceil(2(2M+1)) points via
/// FFT. Owns its FFT workspace; use one instance per thread.
class FloquetPropagator {
public:
    FloquetPropagator(int grid_M, double hbar_s);
    ~FloquetPropagator();
    FloquetPropagator(const FloquetPropagator&) = delete;
    FloquetPropagator& operator=(const FloquetPropagator&) = delete;

    int position_points() const noexcept;

    /// psi(x) -> exp(-i effective_K cos(x) / hbar_s) psi(x).
    void kick(QuantumState& state, double effective_K);

    /// a_m -> exp(-i p_m^2 duration / (2 hbar_s)) a_m.
    void free_evolve(QuantumState& state, double duration);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

QuantumState apply_kick(QuantumState state, double effective_K);
QuantumState free_evolve(QuantumState state, double duration);

struct MomentumProfile {
    std::vector<double> p_values;
    std::vector<double> f;
    int time = 0;
};

struct EnergyCurve {
    std::vector<int> times;
    std::vector<double> mean_E;
    std::vector<double> std_E;
    int n_realizations = 0;
};

/// Ensemble f(p = 0) series: mean and across-realization standard deviation.
struct F0Series {
    std::vector<int> times;
    std::vector<double> mean;
    std::vector<double> std;
};

/// Observables of one trajectory. energy and f0 are indexed by t = 0..N;
/// profiles follow config.record_times.
struct TrajectoryRecord {
    std::vector<double> energy;
    std::vector<double> f0;
    std::vector<MomentumProfile> profiles;
};

/// Runs the one-period map over the schedule: kick of strength K * amplitudes[n]
/// where mask[n], then free evolution for durations[n]. Throws GridOverflowError
/// naming the period at which the boundary occupation limit was breached.
TrajectoryRecord evolve_trajectory(const SimConfig& config, const KickSchedule& schedule,
                                   double beta = 0.0);

struct EnsembleResult {
    EnergyCurve energy;
    F0Series f0;
    std::vector<MomentumProfile> profiles;
    std::vector<std::uint64_t> seeds;  ///< per-realization schedule seeds
};

/// Seed of realization r's kick schedule.
std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t r);

/// Quasi-momentum of realization r (0 when beta_spread == 0).
double realization_beta(const SimConfig& config, std::size_t r);

/// Averages evolve_trajectory over config.ensemble_size realizations. Results
/// are independent of `workers`: reductions run in realization order.
EnsembleResult ensemble_run(const SimConfig& config, int workers = 1);

}  // namespace lkr
