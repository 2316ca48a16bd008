#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lkr/analysis.hpp"
#include "lkr/classical_engine.hpp"
#include "lkr/quantum_engine.hpp"

namespace lkr {

struct ConfigViolation {
    std::string field;
    std::string message;
};

/// Everything a run reads from its config file. The file is flat `key = value`
/// text; `#` starts a comment. Keys mirror the SimConfig fields plus
///   noise            periodic | levy | stn | amplitude
///   alpha, delta_max, eps_max   parameter of the chosen noise
///   n_particles, classical_sigma_p, section_particles   classical ensemble
///   fit_t_min, fit_t_max        regression window
///   A0, A1, A2, t_b             constants for theory curves
///   experiment                  default experiment name
struct RunConfig {
    SimConfig sim;
    int n_particles = 10000;
    double classical_sigma_p = 1.0;
    int section_particles = 200;
    FitWindow fit_window{10.0, 1e300};
    double A0 = 0.0, A1 = 0.0, A2 = 0.0, t_b = 3.0;
    std::optional<std::string> experiment;

    ClassicalEnsembleConfig classical() const;

    /// Canonical `key = value` rendering; parse_config_text(to_text()) round-trips.
    std::string to_text() const;
};

/// Every violation found, in file order followed by cross-field checks.
std::vector<ConfigViolation> check_config_text(const std::string& text);

/// Parses and validates; throws ConfigError naming the first violation.
RunConfig parse_config_text(const std::string& text);

/// Reads a file. Throws std::runtime_error when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Violations of the config at `path`; empty when valid. Throws
/// std::runtime_error when the file is unreadable.
std::vector<ConfigViolation> validate_config(const std::filesystem::path& path);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace lkr
