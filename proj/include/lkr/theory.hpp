#pragma once

#include <optional>

namespace lkr {

/// Decay law used inside the Mittag-Leffler factor of the sub-unit-exponent
/// decoherence factor.
enum class MLArgumentSign {
    Relaxation,  ///< E_alpha(-(1-q^2) sinc(alpha) t^alpha): D in (0, 1], nonincreasing
    AsPrinted,   ///< E_alpha(+(1-q^2) sinc(alpha) t^alpha): exceeds 1 at small t
};

struct TheoryParams {
    double alpha = 0.75;
    double q = 0.0;                  ///< |q| <= 1
    std::optional<double> tau_bar;   ///< mean waiting time, present iff alpha > 1
    double A0 = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    double t_b = 3.0;                ///< break time, informational
    MLArgumentSign ml_sign = MLArgumentSign::Relaxation;

    /// q = J0(K/hbar_s) and tau_bar = alpha/(alpha-1) for alpha > 1.
    static TheoryParams from_physics(double alpha, double K, double hbar_s);

    void validate() const;
};

/// Alternating series 1 - (x^2/2) <cos^2> + (x^4/4!) <cos^4> - ... in x = K'/hbar_s,
/// with uniform phase averages <cos^2k x> = C(2k, k)/4^k; summed over n_terms
/// terms. Throws AccuracyError when the first omitted term exceeds tol.
double q_factor(double K_prime, double hbar_s, int n_terms = 40, double tol = 1e-12);

struct Decoherence {
    double value;
    bool limit_case;  ///< alpha == 1: evaluated through the exponential branch limit
};

/// D(t, 0), normalized so D(0) = 1.
///   alpha < 1:  exp(-(1-q^2) t) E_alpha(+-(1-q^2) sin(pi alpha)/(pi alpha) t^alpha)
///   alpha > 1:  exp(-(1-q^2)(1 - 1/tau_bar) t)
///   alpha = 1:  tau_bar -> infinity, so exp(-(1-q^2) t), flagged
Decoherence decoherence_factor(double t, const TheoryParams& params);

/// Mean energy growth: A0 t + A1 t^alpha for alpha < 1, A2 t otherwise.
double predicted_energy(double t, const TheoryParams& params);

}  // namespace lkr
