#pragma once

namespace lkr {

struct MLEvalOptions {
    double rel_tol = 1e-15;  ///< in (0, 1e-4]
    int max_terms = 20000;   ///< >= 100
};

/// Which evaluation route mittag_leffler takes for a given (alpha, z).
enum class MLBranch {
    Series,          ///< power series in double precision
    ExtendedSeries,  ///< power series in binary128, for alternating sums with heavy cancellation
    Asymptotic,      ///< exponential (z > 0) or algebraic (z < 0) expansion
};

/// Crossovers are expressed in s = |z|^(1/alpha), which controls both the
/// size of the largest series term (about e^s) and the decay of the neglected
/// exponentially small asymptotic corrections.
inline constexpr double kMLSeriesLimit = 10.0;      // double series for negative z up to here
inline constexpr double kMLAsymptoticFrom = 40.0;   // asymptotic expansion from here on
inline constexpr double kMLOverflowExponent = 700.0;

/// Largest z for which E_alpha(z) is finite in double precision.
double mittag_leffler_overflow_bound(double alpha);

MLBranch mittag_leffler_branch(double alpha, double z);

/// One-parameter Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1)
/// for real z and alpha in (0, 2].
///
/// Throws DomainError for alpha outside (0, 2] or non-finite z, OverflowError
/// for z above mittag_leffler_overflow_bound(alpha), and AccuracyError if a
/// series fails to converge within opts.max_terms or the argument lies in the
/// unsupported region alpha >= 1, z < 0, |z|^(1/alpha) > kMLAsymptoticFrom.
double mittag_leffler(double alpha, double z, const MLEvalOptions& opts = {});

/// The individual routes, exposed so they can be compared in their overlap.
double mittag_leffler_series(double alpha, double z, const MLEvalOptions& opts = {});
double mittag_leffler_series_extended(double alpha, double z, const MLEvalOptions& opts = {});
double mittag_leffler_asymptotic(double alpha, double z, const MLEvalOptions& opts = {});

}  // namespace lkr
