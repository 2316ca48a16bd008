#pragma once

// Reference Mittag-Leffler values for tests. Two independent routes:
//   series_mpfr    partial sums of z^k / Gamma(alpha k + 1) in MPFR, at least
//                  200 decimal digits, more when the alternating sum cancels
//   spectral       E_a(-x) = int_0^inf exp(-r t) K_a(r) dr, t = x^(1/a),
//                  K_a(r) = sin(pi a) r^(a-1) / (pi (r^(2a) + 2 r^a cos(pi a) + 1)),
//                  for 0 < a < 1, by double-exponential quadrature in 50 digits
// The partial sums need about |z|^(1/a) / ln 2 extra bits on the negative axis,
// so the spectral route takes over once that becomes impractical.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <mpfr.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

// alpha = num / den, both small integers; the Gamma factors are advanced by
// exact recurrences along den interleaved chains.
inline double ml_series_mpfr(int num, int den, double z) {
    const double alpha = static_cast<double>(num) / den;
    const double s = std::pow(std::fabs(z), 1.0 / alpha);
    const long extra = z < 0 ? static_cast<long>(s / std::log(2.0)) + 64 : 0;
    const mpfr_prec_t prec = 665 + extra;  // 665 bits ~ 200 digits

    mpfr_t x, term, sum, g, tmp, eps;
    mpfr_inits2(prec, x, term, sum, g, tmp, eps, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(x, z, MPFR_RNDN);
    mpfr_set_ui(sum, 1, MPFR_RNDN);

    // gam[j] holds Gamma(alpha k + 1) for the latest k with k % den == j.
    std::vector<__mpfr_struct> gam(static_cast<std::size_t>(den));
    for (int j = 0; j < den; ++j) {
        mpfr_init2(&gam[static_cast<std::size_t>(j)], prec);
        mpfr_set_ui(tmp, static_cast<unsigned long>(j * num), MPFR_RNDN);
        mpfr_div_ui(tmp, tmp, static_cast<unsigned long>(den), MPFR_RNDN);
        mpfr_add_ui(tmp, tmp, 1, MPFR_RNDN);
        mpfr_gamma(&gam[static_cast<std::size_t>(j)], tmp, MPFR_RNDN);
    }

    mpfr_set_ui(term, 1, MPFR_RNDN);  // z^k
    mpfr_set_ui(eps, 1, MPFR_RNDN);
    mpfr_mul_2si(eps, eps, -static_cast<long>(prec) + 8, MPFR_RNDN);
    double result = 0.0;
    for (long k = 1;; ++k) {
        mpfr_mul(term, term, x, MPFR_RNDN);
        mpfr_ptr gk = &gam[static_cast<std::size_t>(k % den)];
        if (k >= den) {
            // Gamma(a k + 1) = Gamma(a (k - den) + 1) * prod_{j=1..num} (a (k - den) + j)
            for (int j = 1; j <= num; ++j) {
                mpfr_set_si(tmp, (k - den) * num, MPFR_RNDN);
                mpfr_div_ui(tmp, tmp, static_cast<unsigned long>(den), MPFR_RNDN);
                mpfr_add_ui(tmp, tmp, static_cast<unsigned long>(j), MPFR_RNDN);
                mpfr_mul(gk, gk, tmp, MPFR_RNDN);
            }
        }
        mpfr_div(g, term, gk, MPFR_RNDN);
        mpfr_add(sum, sum, g, MPFR_RNDN);
        if (alpha * static_cast<double>(k) > s + 10.0) {
            mpfr_abs(g, g, MPFR_RNDN);
            mpfr_abs(tmp, sum, MPFR_RNDN);
            mpfr_mul(tmp, tmp, eps, MPFR_RNDN);
            if (mpfr_cmp(g, tmp) < 0) break;
        }
        if (k > 50'000'000) throw std::runtime_error("oracle series did not converge");
    }
    result = mpfr_get_d(sum, MPFR_RNDN);
    for (auto& v : gam) mpfr_clear(&v);
    mpfr_clears(x, term, sum, g, tmp, eps, static_cast<mpfr_ptr>(nullptr));
    return result;
}

// E_alpha(-x), x > 0, 0 < alpha < 1.
inline double ml_spectral(double alpha_d, double x_d) {
    using Real = boost::multiprecision::cpp_bin_float_50;
    const Real alpha = alpha_d;
    const Real t = pow(Real(x_d), 1 / alpha);
    const Real pi = boost::math::constants::pi<Real>();
    const Real sa = sin(pi * alpha), ca = cos(pi * alpha);
    // Substituting r = u / t puts the exp(-u) scale at O(1) for every x.
    auto f = [&](const Real& u) -> Real {
        const Real r = u / t;
        const Real ra = pow(r, alpha);
        return exp(-u) * sa * ra / (r * pi * (ra * ra + 2 * ra * ca + 1)) / t;
    };
    boost::math::quadrature::exp_sinh<Real> integrator;
    Real err = 0;
    const Real v = integrator.integrate(f, Real(0), std::numeric_limits<Real>::infinity(),
                                        Real(1e-30), &err);
    if (err > 1e-20 * abs(v)) throw std::runtime_error("oracle quadrature did not converge");
    return static_cast<double>(v);
}

inline constexpr double kSeriesBitsBudget = 4000.0;

// Picks the series whenever its working precision stays moderate.
inline double ml(int num, int den, double z) {
    const double alpha = static_cast<double>(num) / den;
    const double s = std::pow(std::fabs(z), 1.0 / alpha);
    if (z >= 0.0 || s / std::log(2.0) < kSeriesBitsBudget) return ml_series_mpfr(num, den, z);
    if (alpha >= 1.0) throw std::invalid_argument("oracle: spectral route needs alpha < 1");
    return ml_spectral(alpha, -z);
}

}  // namespace oracle
