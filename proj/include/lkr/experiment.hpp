#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lkr/analysis.hpp"
#include "lkr/config.hpp"

namespace lkr {

enum class ExperimentKind { EnergyGrowth, MomentumProfiles, F0Decay, ClassicalSection, TheoryOverlay };

const char* to_string(ExperimentKind k);

/// Throws ConfigError("experiment", ...) for an unknown name.
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::EnergyGrowth;
    std::optional<std::uint64_t> seed_override;
    int workers = 1;
};

struct RunManifest {
    std::string version;
    std::string experiment;
    std::string config_text;            ///< canonical snapshot of the resolved config
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds;   ///< per-realization (or per-particle) schedule seeds
    std::vector<std::string> artifacts; ///< file names relative to the output directory
    int workers = 1;
    double wall_seconds = 0.0;
    std::string started_utc;
    std::vector<std::string> notes;

    std::string to_json() const;
};

inline constexpr const char* kVersion = "1.0.0";

/// Runs one experiment from an in-memory config and writes its CSV files and
/// manifest.json into out_dir (created if needed).
RunManifest run_experiment(const ExperimentSpec& spec, RunConfig config,
                           const std::filesystem::path& out_dir);

RunManifest run_experiment(const ExperimentSpec& spec, const std::filesystem::path& config_path,
                           const std::filesystem::path& out_dir);

// CSV helpers. All numbers are written with 12 significant digits.
std::string format_number(double x);
void write_energy_csv(const std::filesystem::path& path, const EnergyCurve& curve);
void write_f0_csv(const std::filesystem::path& path, const F0Series& series);
void write_profile_csv(const std::filesystem::path& path, const MomentumProfile& profile);
void write_fit_csv(const std::filesystem::path& path, const std::vector<FitResult>& fits);

EnergyCurve read_energy_csv(const std::filesystem::path& path);
F0Series read_f0_csv(const std::filesystem::path& path);

/// Refits existing outputs in dir: energy_curve.csv (growth law and single
/// power law) and f0.csv when present. Writes fit.csv and returns the fits.
std::vector<FitResult> refit_directory(const std::filesystem::path& dir, FitWindow window = {});

}  // namespace lkr
