#include "lkr/theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lkr/errors.hpp"
#include "lkr/special_fn.hpp"

namespace lkr {

TheoryParams TheoryParams::from_physics(double alpha, double K, double hbar_s) {
    TheoryParams p;
    p.alpha = alpha;
    p.q = q_factor(K, hbar_s);
    if (alpha > 1.0) p.tau_bar = alpha / (alpha - 1.0);
    p.validate();
    return p;
}

void TheoryParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (!(q >= -1.0 && q <= 1.0)) throw DomainError("q must lie in [-1, 1]");
    if (alpha > 1.0 && !tau_bar) throw DomainError("tau_bar is required for alpha > 1");
    if (alpha <= 1.0 && tau_bar) throw DomainError("tau_bar is undefined for alpha <= 1");
    if (tau_bar && !(*tau_bar > 1.0)) throw DomainError("tau_bar must exceed 1");
    if (A0 < 0.0 || A1 < 0.0 || A2 < 0.0) throw DomainError("A-constants must be nonnegative");
}

double q_factor(double K_prime, double hbar_s, int n_terms, double tol) {
    if (!(hbar_s > 0.0)) throw DomainError("hbar_s must be positive");
    if (n_terms < 2) throw DomainError("q_factor needs at least two terms");
    const double x = K_prime / hbar_s;
    const double x2 = x * x;

    // term_k = (-1)^k x^(2k)/(2k)! * C(2k,k)/4^k = (-1)^k (x^2/4)^k / (k!)^2
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < n_terms; ++k) {
        term *= -x2 / (4.0 * k * k);
        sum += term;
    }
    const double next = std::fabs(term) * x2 / (4.0 * n_terms * n_terms);
    // The alternating tail is bounded by its first term once terms decrease.
    const bool decreasing = x2 / 4.0 < static_cast<double>(n_terms) * n_terms;
    if (!decreasing || next > tol)
        throw AccuracyError("q-factor series not converged with " + std::to_string(n_terms) +
                                " terms at K'/hbar_s = " + std::to_string(x),
                            sum, decreasing ? next : std::numeric_limits<double>::infinity());
    return sum;
}

Decoherence decoherence_factor(double t, const TheoryParams& params) {
    params.validate();
    if (!(t >= 0.0)) throw DomainError("time must be >= 0");
    const double a = params.alpha;
    const double c = 1.0 - params.q * params.q;

    if (a < 1.0) {
        const double sinc = std::sin(std::numbers::pi * a) / (std::numbers::pi * a);
        double arg = c * sinc * std::pow(t, a);
        if (params.ml_sign == MLArgumentSign::Relaxation) arg = -arg;
        return {std::exp(-c * t) * mittag_leffler(a, arg), false};
    }
    if (a == 1.0) return {std::exp(-c * t), true};
    return {std::exp(-c * (1.0 - 1.0 / *params.tau_bar) * t), false};
}

double predicted_energy(double t, const TheoryParams& params) {
    if (params.alpha < 1.0) return params.A0 * t + params.A1 * std::pow(t, params.alpha);
    return params.A2 * t;
}

}  // namespace lkr
