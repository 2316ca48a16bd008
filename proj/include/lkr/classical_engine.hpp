#pragma once

#include <cstdint>
#include <vector>

#include "lkr/levy_noise.hpp"
#include "lkr/quantum_engine.hpp"

namespace lkr {

/// Point on the cylinder, x in [0, 2 pi).
struct ClassicalState {
    double x = 0.0;
    double p = 0.0;
};

/// Chirikov standard map: p' = p + K sin x, x' = x + p' (mod 2 pi).
ClassicalState map_step(ClassicalState s, double effective_K);

/// Free rotation x' = x + p duration (mod 2 pi); a skipped kick.
ClassicalState free_rotate(ClassicalState s, double duration);

/// Largest Lyapunov exponent of the periodic standard map, from the tangent
/// map with per-step renormalization.
double largest_lyapunov(double K, ClassicalState start, int steps);

struct ClassicalEnsembleConfig {
    double K = 5.8;
    NoiseMode noise = noise::Periodic{};
    int horizon = 100;
    int n_particles = 10000;
    std::uint64_t master_seed = 1;
    double sigma_p = 1.0;               ///< width of the Gaussian initial momentum
    std::vector<int> record_times{0};   ///< section sampling times
    int section_particles = 200;        ///< particles contributing to the section

    void validate() const;
};

struct SectionPoint {
    double x;
    double p;
    int t;
};

struct ClassicalResult {
    EnergyCurve energy;  ///< <p^2>/2 at t = 0..N
    std::vector<SectionPoint> section;
};

/// Each particle gets its own kick schedule (seeded like quantum realization i)
/// and initial condition: x uniform, p Gaussian of width sigma_p. Section points
/// are taken after the free-rotation half of each recorded period.
ClassicalResult classical_ensemble(const ClassicalEnsembleConfig& config, int workers = 1);

}  // namespace lkr
