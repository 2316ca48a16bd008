#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lkr {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Result would not be representable as a finite double.
class OverflowError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical routine could not reach the requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

/// Invalid simulation or CLI configuration. `field` names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Probability mass reached the edge of the truncated momentum grid.
class GridOverflowError : public std::runtime_error {
public:
    static constexpr std::size_t kNoRealization = static_cast<std::size_t>(-1);

    GridOverflowError(int period, double boundary_occupation,
                      std::size_t realization = kNoRealization)
        : std::runtime_error(format(period, boundary_occupation, realization)),
          period_(period), boundary_occupation_(boundary_occupation), realization_(realization) {}

    int period() const noexcept { return period_; }
    double boundary_occupation() const noexcept { return boundary_occupation_; }
    std::size_t realization() const noexcept { return realization_; }
    bool has_realization() const noexcept { return realization_ != kNoRealization; }

    GridOverflowError with_realization(std::size_t r) const {
        return GridOverflowError(period_, boundary_occupation_, r);
    }

private:
    static std::string format(int period, double occ, std::size_t r) {
        std::string s = "momentum grid overflow at period " + std::to_string(period) +
                        " (boundary occupation " + std::to_string(occ) + ")";
        if (r != kNoRealization) s += " in realization " + std::to_string(r);
        return s;
    }

    int period_;
    double boundary_occupation_;
    std::size_t realization_;
};

}  // namespace lkr
