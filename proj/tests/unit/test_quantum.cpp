#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lkr/analysis.hpp"
#include "lkr/errors.hpp"
#include "lkr/quantum_engine.hpp"

using namespace lkr;
using cd = std::complex<double>;

namespace {

SimConfig base(int M = 256, int N = 100) {
    SimConfig c;
    c.grid_M = M;
    c.horizon = N;
    c.record_times = {0, N};
    return c;
}

QuantumState random_state(int M, double hbar, unsigned seed) {
    QuantumState s(M, hbar);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    double norm = 0.0;
    for (int m = -M / 4; m <= M / 4; ++m) {
        s.at(m) = {n(gen), n(gen)};
        norm += std::norm(s.at(m));
    }
    for (auto& a : s.amplitudes()) a /= std::sqrt(norm);
    return s;
}

double max_diff(const QuantumState& a, const QuantumState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
    return d;
}

double max_rel_energy_diff(const EnergyCurve& a, const EnergyCurve& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.mean_E.size(); ++i)
        d = std::max(d, std::fabs(a.mean_E[i] - b.mean_E[i]) / b.mean_E[i]);
    return d;
}

}  // namespace

TEST_CASE("Gaussian initial state") {
    SimConfig c = base(512);
    c.initial_sigma_p = 2.0;
    const auto s = init_gaussian_state(c);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(s.mean_momentum()) < 1e-14);
    CHECK(s.mean_p2() == doctest::Approx(4.0).epsilon(0.02));
    CHECK(s.beta() == 0.0);

    SimConfig wide = base(4);
    wide.initial_sigma_p = 20.0;
    try {
        init_gaussian_state(wide);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "initial_sigma_p");
    }
}

TEST_CASE("zero kick is the identity") {
    const auto s = random_state(128, 2.09, 1);
    CHECK(max_diff(apply_kick(s, 0.0), s) < 1e-14);
}

TEST_CASE("kicked momentum eigenstate populates Bessel sidebands") {
    const double K = 5.8, hbar = 2.09;
    QuantumState s(64, hbar);
    s.at(0) = 1.0;
    const auto k = apply_kick(s, K);
    for (int m = -64; m <= 64; ++m) {
        const double j = std::cyl_bessel_j(static_cast<double>(std::abs(m)), K / hbar);
        CAPTURE(m);
        CHECK(std::fabs(k.occupation(m) - j * j) < 1e-12);
    }
}

TEST_CASE("kick and free evolution are unitary") {
    auto s = random_state(256, 2.09, 2);
    FloquetPropagator prop(256, 2.09);
    for (int i = 0; i < 20; ++i) {
        prop.kick(s, 5.8 * (1.0 + 0.01 * i));
        prop.free_evolve(s, 1.0 + 0.013 * i);
    }
    CHECK(std::fabs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("free-evolution phase") {
    QuantumState s(8, 2.0);
    s.at(1) = 1.0;
    const auto f = free_evolve(s, 1.0);
    CHECK(std::abs(f.at(1) - std::exp(cd(0.0, -1.0))) < 1e-15);

    const auto r = random_state(64, 2.09, 3);
    for (int m = -64; m <= 64; ++m) CHECK(std::abs(free_evolve(r, 0.7).at(m)) == doctest::Approx(std::abs(r.at(m))));
}

TEST_CASE("free evolution at the quantum resonance is the identity") {
    const double hbar = 4.0 * std::numbers::pi;
    const auto s = random_state(64, hbar, 4);
    const auto f = free_evolve(s, 1.0);
    const cd phase = f.at(0) / s.at(0);
    double d = 0.0;
    for (int m = -64; m <= 64; ++m) d = std::max(d, std::abs(f.at(m) - phase * s.at(m)));
    CHECK(d < 1e-12);
}

TEST_CASE("free evolutions compose") {
    const auto s = random_state(128, 2.09, 5);
    CHECK(max_diff(free_evolve(free_evolve(s, 0.83), 1.31), free_evolve(s, 2.14)) < 1e-12);
}

TEST_CASE("energy at t = 0 is the initial energy and a kickless schedule conserves it") {
    const SimConfig c = base(256, 40);
    KickSchedule sched = build_schedule(noise::Periodic{}, 40, 1);
    sched.mask.assign(40, false);
    const auto rec = evolve_trajectory(c, sched);
    const double e0 = init_gaussian_state(c).energy();
    CHECK(rec.energy[0] == e0);
    for (double e : rec.energy) CHECK(e == doctest::Approx(e0).epsilon(1e-13));
}

TEST_CASE("norm drift over 1000 periods in every mode") {
    for (const NoiseMode& m : {NoiseMode{noise::Periodic{}}, NoiseMode{noise::Levy{0.75}},
                               NoiseMode{noise::StationaryTiming{0.2}}, NoiseMode{noise::Amplitude{0.25}}}) {
        SimConfig c = base(1024, 1000);
        c.noise = m;
        const auto sched = build_schedule(m, 1000, 77);
        auto s = init_gaussian_state(c);
        FloquetPropagator prop(c.grid_M, c.hbar_s);
        for (int i = 0; i < 1000; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            if (sched.mask[iu]) prop.kick(s, c.K * sched.amplitudes[iu]);
            prop.free_evolve(s, sched.durations[iu]);
        }
        CHECK(s.boundary_occupation() < kBoundaryOccupationLimit);
        CHECK(std::fabs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("ballistic growth at the quantum resonance") {
    SimConfig c = base(256, 10);
    c.hbar_s = 4.0 * std::numbers::pi;
    const auto rec = evolve_trajectory(c, build_schedule(noise::Periodic{}, 10, 1));
    // Free evolution is the identity, so t kicks act as one kick of strength tK:
    // E(t) - E(0) grows exactly as t^2.
    const double c1 = rec.energy[1] - rec.energy[0];
    for (int t = 1; t <= 10; ++t)
        CHECK((rec.energy[static_cast<std::size_t>(t)] - rec.energy[0]) / (t * t) == doctest::Approx(c1).epsilon(1e-9));
    EnergyCurve curve;
    for (int t = 0; t <= 10; ++t) {
        curve.times.push_back(t);
        curve.mean_E.push_back(rec.energy[static_cast<std::size_t>(t)]);
        curve.std_E.push_back(0.0);
    }
    curve.n_realizations = 1;
    CHECK(fit_power_law(curve, {1.0, 10.0}).value("gamma") == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("periodic kicks localize") {
    SimConfig c = base(1024, 70);
    const auto rec = evolve_trajectory(c, build_schedule(noise::Periodic{}, 70, 1));
    const double ratio = rec.energy[70] / rec.energy[10];
    CHECK(ratio >= 0.7);
    CHECK(ratio <= 1.5);
}

TEST_CASE("periodic ensemble has no spread") {
    SimConfig c = base(256, 30);
    c.ensemble_size = 5;
    const auto r = ensemble_run(c, 2);
    for (double s : r.energy.std_E) CHECK(s == 0.0);
    for (double s : r.f0.std) CHECK(s == 0.0);
    CHECK(r.energy.n_realizations == 5);
}

TEST_CASE("ensemble observables") {
    SimConfig c = base(256, 60);
    c.noise = noise::Levy{0.5};
    c.ensemble_size = 70;
    c.record_times = {0, 14, 60};
    const auto a = ensemble_run(c, 1);
    const auto b = ensemble_run(c, 3);
    CHECK(a.energy.mean_E == b.energy.mean_E);
    CHECK(a.energy.std_E == b.energy.std_E);
    CHECK(a.f0.mean == b.f0.mean);
    REQUIRE(a.profiles.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.profiles[i].f == b.profiles[i].f);
        double sum = 0.0;
        for (double f : a.profiles[i].f) sum += f;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(a.profiles[1].time == 14);
    CHECK(a.seeds.size() == 70);
    CHECK(a.seeds[3] == realization_seed(c.master_seed, 3));
    CHECK(a.energy.std_E[60] > 0.0);
}

TEST_CASE("quasi-momentum spread") {
    SimConfig c = base(128, 20);
    c.beta_spread = 0.3;
    c.ensemble_size = 50;
    for (std::size_t r = 0; r < 50; ++r) {
        const double b = realization_beta(c, r);
        CHECK(b >= -0.5);
        CHECK(b < 0.5);
    }
    CHECK(realization_beta(c, 7) != realization_beta(c, 8));
    c.beta_spread = 0.0;
    CHECK(realization_beta(c, 7) == 0.0);
}

TEST_CASE("grid overflow names the period and the realization") {
    SimConfig c = base(16, 200);
    try {
        evolve_trajectory(c, build_schedule(noise::Periodic{}, 200, 1));
        FAIL("expected GridOverflowError");
    } catch (const GridOverflowError& e) {
        CHECK(e.period() >= 1);
        CHECK_FALSE(e.has_realization());
    }
    c.ensemble_size = 4;
    c.noise = noise::StationaryTiming{0.2};
    try {
        ensemble_run(c, 2);
        FAIL("expected GridOverflowError");
    } catch (const GridOverflowError& e) {
        CHECK(e.has_realization());
        CHECK(e.realization() == 0);
        CHECK(std::string(e.what()).find("realization 0") != std::string::npos);
    }
}

TEST_CASE("doubling the grid changes the energy by less than 0.5 percent") {
    {
        const SimConfig c = base(1024, 100);
        const auto s = build_schedule(noise::Periodic{}, 100, 1);
        const auto a = evolve_trajectory(c, s);
        const auto b = evolve_trajectory(base(2048, 100), s);
        for (std::size_t t = 0; t <= 100; ++t) CHECK(std::fabs(a.energy[t] / b.energy[t] - 1.0) < 5e-3);
    }
    for (const NoiseMode& m : {NoiseMode{noise::Levy{0.75}}, NoiseMode{noise::StationaryTiming{0.2}},
                               NoiseMode{noise::Amplitude{0.25}}}) {
        SimConfig c = base(256, 200);
        c.noise = m;
        c.ensemble_size = 24;
        SimConfig d = c;
        d.grid_M = 512;
        CHECK(max_rel_energy_diff(ensemble_run(c).energy, ensemble_run(d).energy) < 5e-3);
    }
}

TEST_CASE("config validation names the field") {
    auto field_of = [](SimConfig c) {
        try {
            c.validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    SimConfig c = base();
    CHECK(field_of(c).empty());
    c.grid_M = 0;
    CHECK(field_of(c) == "grid_M");
    c = base();
    c.record_times = {10, 3};
    CHECK(field_of(c) == "record_times");
    c = base();
    c.record_times = {};
    CHECK(field_of(c) == "record_times");
    c = base();
    c.noise = noise::Levy{-1.0};
    CHECK(field_of(c) == "alpha");
    c = base();
    c.noise = noise::StationaryTiming{1.2};
    CHECK(field_of(c) == "delta_max");
    c = base();
    c.hbar_s = 0.0;
    CHECK(field_of(c) == "hbar_s");
}
