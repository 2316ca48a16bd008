// lkr: command-line front end for the kicked-rotor simulations.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "lkr/config.hpp"
#include "lkr/errors.hpp"
#include "lkr/experiment.hpp"
#include "lkr/parallel.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kGrid = 3, kAccuracy = 4 };

struct Options {
    std::string config;
    std::string out = "out";
    int workers = lkr::default_workers();
    std::optional<std::uint64_t> seed;
    std::string experiment;
};

void print_manifest_summary(const lkr::RunManifest& m, const std::string& out) {
    std::cout << m.experiment << ": wrote";
    for (const auto& a : m.artifacts) std::cout << ' ' << a;
    std::cout << " manifest.json to " << out << " in " << m.wall_seconds << " s\n";
    for (const auto& n : m.notes) std::cout << "note: " << n << '\n';
}

int run(const Options& o, const std::string& fallback, const std::vector<lkr::ExperimentKind>& allowed) {
    lkr::RunConfig cfg = lkr::load_config(o.config);
    const std::string name = !o.experiment.empty() ? o.experiment : cfg.experiment.value_or(fallback);
    const lkr::ExperimentKind kind = lkr::parse_experiment(name);
    if (std::find(allowed.begin(), allowed.end(), kind) == allowed.end())
        throw lkr::ConfigError("experiment", "'" + name + "' is not available in this subcommand");
    lkr::ExperimentSpec spec{kind, o.seed, o.workers};
    print_manifest_summary(lkr::run_experiment(spec, std::move(cfg), o.out), o.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kicked-rotor simulations under Levy, timing and amplitude noise"};
    app.require_subcommand(1);
    Options o;

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config file (key = value)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--seed", o.seed, "Master seed, overrides the config");
        sub->add_option("--experiment", o.experiment, "Experiment name");
    };

    auto* simulate = app.add_subcommand("simulate", "Quantum ensemble: energy_growth, momentum_profiles, f0_decay");
    add_run_options(simulate);
    auto* classical = app.add_subcommand("classical", "Classical ensemble and stroboscopic section");
    add_run_options(classical);
    auto* theory = app.add_subcommand("theory", "Decoherence factor and predicted energy curves");
    add_run_options(theory);

    auto* fit = app.add_subcommand("fit", "Refit energy_curve.csv and f0.csv in an output directory");
    fit->add_option("--out", o.out, "Directory holding the CSV files")->required()->check(CLI::ExistingDirectory);
    fit->add_option("--config", o.config, "Config supplying fit_t_min and fit_t_max")->check(CLI::ExistingFile);

    auto* validate = app.add_subcommand("validate", "Check a config file and list every violation");
    validate->add_option("--config", o.config, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*simulate)
            return run(o, "energy_growth",
                       {lkr::ExperimentKind::EnergyGrowth, lkr::ExperimentKind::MomentumProfiles,
                        lkr::ExperimentKind::F0Decay});
        if (*classical) return run(o, "classical_section", {lkr::ExperimentKind::ClassicalSection});
        if (*theory) return run(o, "theory_overlay", {lkr::ExperimentKind::TheoryOverlay});
        if (*fit) {
            lkr::FitWindow window;
            if (!o.config.empty()) window = lkr::load_config(o.config).fit_window;
            for (const auto& f : lkr::refit_directory(o.out, window)) {
                std::cout << f.model;
                for (const auto& p : f.params) std::cout << ' ' << p.name << '=' << p.value << "+-" << p.sigma;
                std::cout << '\n';
            }
            return kOk;
        }
        if (*validate) {
            const auto violations = lkr::validate_config(o.config);
            if (violations.empty()) {
                std::cout << "ok\n";
                return kOk;
            }
            for (const auto& v : violations) std::cerr << "config error: " << v.field << ": " << v.message << '\n';
            return kConfig;
        }
    } catch (const lkr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const lkr::GridOverflowError& e) {
        std::cerr << "grid overflow: " << e.what() << '\n';
        return kGrid;
    } catch (const lkr::AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << " (best estimate " << e.best_estimate()
                  << ", error bound " << e.error_bound() << ")\n";
        return kAccuracy;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
