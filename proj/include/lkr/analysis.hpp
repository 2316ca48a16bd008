#pragma once

#include <span>
#include <string>
#include <vector>

#include "lkr/quantum_engine.hpp"

namespace lkr {

struct FitParam {
    std::string name;
    double value;
    double sigma;  ///< one-sigma uncertainty, >= 0 (infinite when unidentifiable)
};

struct FitResult {
    std::string model;
    std::vector<FitParam> params;
    double rss = 0.0;   ///< residual sum of squares in the space the model was fit
    double aicc = 0.0;  ///< small-sample corrected AIC, Gaussian residual likelihood
    double t_min = 0.0;
    double t_max = 0.0;
    int n_points = 0;
    bool alpha_unidentifiable = false;

    const FitParam& param(const std::string& name) const;
    double value(const std::string& name) const { return param(name).value; }
};

struct FitWindow {
    double t_min = 10.0;
    double t_max = 1e300;
};

/// AICc = n ln(RSS/n) + 2k + 2k(k+1)/(n-k-1), k counting the noise variance.
double aicc(double rss, int n_points, int n_model_params);

/// E(t) = A0 t + A1 t^alpha with A0, A1 >= 0. alpha is profiled over
/// [0.05, 1.5] in steps of 0.005 (linear least squares for the amplitudes at
/// each alpha), then refined by golden-section search. When the power-law
/// term carries no signal alpha is reported as NaN with alpha_unidentifiable set.
FitResult fit_energy_growth(const EnergyCurve& curve, FitWindow window = {});

/// Single power law E(t) - E(0) = c t^gamma by least squares in log-log space.
FitResult fit_power_law(const EnergyCurve& curve, FitWindow window = {});

enum class DecayModel { Exponential, PowerLaw };

struct DecayFit {
    DecayModel preferred;
    FitResult exponential;  ///< ln f0 = ln c - rate t
    FitResult power_law;    ///< ln f0 = ln c - exponent ln t
};

/// Fits both decay laws to (t, f0) pairs with t > 0 and picks the lower AICc.
DecayFit fit_f0_decay(std::span<const double> times, std::span<const double> f0);
DecayFit fit_f0_decay(const F0Series& series, FitWindow window = {1.0, 1e300});

enum class ProfileShape { Exponential, Gaussian };

struct ProfileClass {
    ProfileShape shape;
    double width;        ///< xi for exp(-|p|/xi), sigma for exp(-p^2/(2 sigma^2))
    double xi;
    double sigma;
    double rss_exponential;
    double rss_gaussian;
    int bins_used;
};

inline constexpr double kProfileFloor = 1e-4;

/// Fits c exp(-|p|/xi) and c exp(-p^2/2sigma^2) to ln f over bins with
/// f >= floor and picks the smaller residual. Throws DomainError with fewer than
/// 10 usable bins.
ProfileClass classify_profile(const MomentumProfile& profile, double floor = kProfileFloor);

const char* to_string(DecayModel m);
const char* to_string(ProfileShape s);

}  // namespace lkr
