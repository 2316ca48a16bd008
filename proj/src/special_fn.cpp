#include "lkr/special_fn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <quadmath.h>

#include "lkr/errors.hpp"

namespace lkr {

namespace {

// Largest tolerated relative rounding error of a series sum before the next
// (more precise) route is tried.
constexpr double kCancellationGuard = 1e-10;

void check_args(double alpha, double z, const MLEvalOptions& opts) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("Mittag-Leffler alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (!std::isfinite(z)) throw DomainError("Mittag-Leffler argument must be finite");
    if (!(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-4))
        throw DomainError("MLEvalOptions.rel_tol must lie in (0, 1e-4]");
    if (opts.max_terms < 100) throw DomainError("MLEvalOptions.max_terms must be >= 100");
}

// sin(pi x), exactly zero at integers.
double sin_pi(double x) {
    const double r = std::fmod(x, 2.0);
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    return std::sin(std::numbers::pi * r);
}

struct SeriesSum {
    double value;
    double rounding;   // estimated absolute rounding error
    double last_term;  // magnitude of the last term added
    bool converged;
};

// Real is double or __float128; the per-term relative error grows with the
// magnitude of the log-space exponent.
template <typename Real>
SeriesSum power_series(double alpha, double z, double tol, int max_terms, Real eps) {
    const bool alternating = z < 0.0;
    const Real log_x = [&] {
        if constexpr (std::is_same_v<Real, double>)
            return std::log(std::fabs(z));
        else
            return logq(fabsq(static_cast<Real>(z)));
    }();
    const double s = std::pow(std::fabs(z), 1.0 / alpha);

    Real sum = 1;
    Real abs_err = eps;
    Real term_abs = 1;
    for (int k = 1; k < max_terms; ++k) {
        const Real a = static_cast<Real>(alpha) * k + 1;
        Real expo;
        if constexpr (std::is_same_v<Real, double>) {
            expo = k * log_x - std::lgamma(a);
            term_abs = std::exp(expo);
            abs_err += term_abs * eps * (1.0 + std::fabs(expo) + std::fabs(k * log_x));
        } else {
            expo = k * log_x - lgammaq(a);
            term_abs = expq(expo);
            abs_err += term_abs * eps * (1 + fabsq(expo) + fabsq(k * log_x));
        }
        sum += (alternating && (k % 2 == 1)) ? -term_abs : term_abs;

        const bool past_peak = alpha * k > s + 1.0;
        if (past_peak && (term_abs == 0 || term_abs <= static_cast<Real>(tol) * (sum < 0 ? -sum : sum)))
            return {static_cast<double>(sum), static_cast<double>(abs_err),
                    static_cast<double>(term_abs), true};
    }
    return {static_cast<double>(sum), static_cast<double>(abs_err), static_cast<double>(term_abs),
            false};
}

double finish_series(const SeriesSum& r, const char* route) {
    if (!r.converged)
        throw AccuracyError(std::string("Mittag-Leffler ") + route + " did not converge",
                            r.value, r.last_term);
    if (!(r.rounding <= kCancellationGuard * std::fabs(r.value)))
        throw AccuracyError(std::string("Mittag-Leffler ") + route + " lost precision to cancellation",
                            r.value, r.rounding);
    return r.value;
}

double evaluate(double alpha, double z, const MLEvalOptions& opts, MLBranch* used) {
    check_args(alpha, z, opts);
    if (z == 0.0) {
        if (used) *used = MLBranch::Series;
        return 1.0;
    }
    const double s = std::pow(std::fabs(z), 1.0 / alpha);

    if (z > 0.0) {
        if (z > std::pow(kMLOverflowExponent, alpha))
            throw OverflowError("Mittag-Leffler E_" + std::to_string(alpha) + "(" + std::to_string(z) +
                                ") overflows double precision");
        if (s < kMLAsymptoticFrom) {
            if (used) *used = MLBranch::Series;
            return mittag_leffler_series(alpha, z, opts);
        }
        if (used) *used = MLBranch::Asymptotic;
        return mittag_leffler_asymptotic(alpha, z, opts);
    }

    if (s > kMLAsymptoticFrom) {
        if (alpha >= 1.0)
            throw AccuracyError("Mittag-Leffler for alpha >= 1 and large negative argument is not supported",
                                std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::infinity());
        if (used) *used = MLBranch::Asymptotic;
        return mittag_leffler_asymptotic(alpha, z, opts);
    }
    if (s <= kMLSeriesLimit) {
        const auto r = power_series<double>(alpha, z, opts.rel_tol, opts.max_terms,
                                            std::numeric_limits<double>::epsilon());
        if (r.converged && r.rounding <= kCancellationGuard * std::fabs(r.value)) {
            if (used) *used = MLBranch::Series;
            return r.value;
        }
    }
    if (used) *used = MLBranch::ExtendedSeries;
    return mittag_leffler_series_extended(alpha, z, opts);
}

}  // namespace

double mittag_leffler_overflow_bound(double alpha) {
    check_args(alpha, 0.0, {});
    return std::pow(kMLOverflowExponent, alpha);
}

MLBranch mittag_leffler_branch(double alpha, double z) {
    MLBranch used = MLBranch::Series;
    evaluate(alpha, z, {}, &used);
    return used;
}

double mittag_leffler(double alpha, double z, const MLEvalOptions& opts) {
    return evaluate(alpha, z, opts, nullptr);
}

double mittag_leffler_series(double alpha, double z, const MLEvalOptions& opts) {
    check_args(alpha, z, opts);
    if (z == 0.0) return 1.0;
    return finish_series(power_series<double>(alpha, z, opts.rel_tol, opts.max_terms,
                                              std::numeric_limits<double>::epsilon()),
                         "series");
}

double mittag_leffler_series_extended(double alpha, double z, const MLEvalOptions& opts) {
    check_args(alpha, z, opts);
    if (z == 0.0) return 1.0;
    // Sum well past double precision so the rounded result is limited only by
    // binary128 cancellation.
    return finish_series(power_series<__float128>(alpha, z, opts.rel_tol * 1e-4, opts.max_terms,
                                                  static_cast<__float128>(0x1.0p-112)),
                         "extended series");
}

// E_alpha(z) ~ [z > 0] (1/alpha) exp(z^(1/alpha)) - sum_{k>=1} z^(-k) / Gamma(1 - alpha k),
// with 1/Gamma(1 - alpha k) = Gamma(alpha k) sin(pi alpha k) / pi. The divergent
// algebraic sum is cut at its smallest term.
double mittag_leffler_asymptotic(double alpha, double z, const MLEvalOptions& opts) {
    check_args(alpha, z, opts);
    if (z == 0.0) throw DomainError("asymptotic expansion is undefined at z = 0");
    if (z < 0.0 && alpha >= 1.0)
        throw DomainError("algebraic expansion on the negative axis requires alpha < 1");

    const double x = std::fabs(z);
    const double log_x = std::log(x);
    double lead = 0.0;
    if (z > 0.0) {
        const double s = std::pow(x, 1.0 / alpha);
        if (x > std::pow(kMLOverflowExponent, alpha)) throw OverflowError("Mittag-Leffler asymptotic overflows");
        lead = std::exp(s) / alpha;
    }

    // For integer alpha every algebraic term vanishes.
    if (alpha == std::floor(alpha)) return lead;

    double algebraic = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    int k = 1;
    for (; k < opts.max_terms; ++k) {
        const double sp = sin_pi(alpha * k);
        if (sp == 0.0) continue;
        const double mag = std::exp(std::lgamma(alpha * k) - k * log_x) * std::fabs(sp) / std::numbers::pi;
        if (mag > smallest) break;
        smallest = mag;
        const double sign = ((z < 0.0 && k % 2 == 1) ? -1.0 : 1.0) * (sp < 0.0 ? -1.0 : 1.0);
        algebraic -= sign * mag;
        if (mag <= opts.rel_tol * std::fabs(lead + algebraic)) break;
    }
    const double value = lead + algebraic;
    if (!(smallest <= kCancellationGuard * std::fabs(value)))
        throw AccuracyError("Mittag-Leffler asymptotic expansion is not accurate at this argument",
                            value, smallest);
    return value;
}

}  // namespace lkr
