#include "lkr/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "lkr/errors.hpp"

namespace lkr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr double kAlphaLo = 0.05;
constexpr double kAlphaHi = 1.5;
constexpr double kAlphaStep = 0.005;

struct Line {
    double intercept, slope;
    double sigma_intercept, sigma_slope;
    double rss;
};

// Ordinary least squares y = intercept + slope x.
Line fit_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("regression needs at least two distinct abscissae");
    Line l{};
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - l.intercept - l.slope * x[i];
        l.rss += r * r;
    }
    const double s2 = x.size() > 2 ? l.rss / (n - 2.0) : 0.0;
    l.sigma_slope = std::sqrt(s2 / sxx);
    l.sigma_intercept = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    return l;
}

struct Amplitudes {
    double A0, A1, rss;
};

// min ||y - A0 t - A1 t^alpha||^2 subject to A0, A1 >= 0.
Amplitudes nnls2(std::span<const double> t, std::span<const double> y, double alpha) {
    double tt = 0, tg = 0, gg = 0, ty = 0, gy = 0;
    std::vector<double> g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        g[i] = std::pow(t[i], alpha);
        tt += t[i] * t[i];
        tg += t[i] * g[i];
        gg += g[i] * g[i];
        ty += t[i] * y[i];
        gy += g[i] * y[i];
    }
    auto rss_of = [&](double a0, double a1) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = y[i] - a0 * t[i] - a1 * g[i];
            s += r * r;
        }
        return s;
    };

    std::array<Amplitudes, 4> cand{};
    std::size_t nc = 0;
    const double det = tt * gg - tg * tg;
    if (det > 1e-12 * tt * gg) {
        const double a0 = (gg * ty - tg * gy) / det;
        const double a1 = (tt * gy - tg * ty) / det;
        if (a0 >= 0.0 && a1 >= 0.0) return {a0, a1, rss_of(a0, a1)};
    }
    const double a0 = std::max(0.0, ty / tt);
    cand[nc++] = {a0, 0.0, rss_of(a0, 0.0)};
    const double a1 = std::max(0.0, gy / gg);
    cand[nc++] = {0.0, a1, rss_of(0.0, a1)};
    return *std::min_element(cand.begin(), cand.begin() + static_cast<long>(nc),
                             [](const auto& a, const auto& b) { return a.rss < b.rss; });
}

// Inverse of a symmetric 3x3 matrix; false when singular.
bool invert3(const std::array<std::array<double, 3>, 3>& m, std::array<std::array<double, 3>, 3>& inv) {
    const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    double scale = 0.0;
    for (const auto& row : m)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    if (!(std::fabs(det) > 1e-14 * scale * scale * scale)) return false;
    const double id = 1.0 / det;
    inv[0][0] = c00 * id;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
    inv[1][0] = c01 * id;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
    inv[2][0] = c02 * id;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
    return true;
}

void select_window(const EnergyCurve& curve, FitWindow w, std::vector<double>& t, std::vector<double>& y) {
    if (curve.times.size() != curve.mean_E.size())
        throw DomainError("energy curve vectors differ in length");
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const double ti = curve.times[i];
        if (ti > 0.0 && ti >= w.t_min && ti <= w.t_max) {
            t.push_back(ti);
            y.push_back(curve.mean_E[i]);
        }
    }
}

}  // namespace

const FitParam& FitResult::param(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name) return p;
    throw DomainError("fit result '" + model + "' has no parameter '" + name + "'");
}

double aicc(double rss, int n_points, int n_model_params) {
    const int k = n_model_params + 1;
    const double n = n_points;
    if (n_points - k - 1 <= 0) throw DomainError("too few points for AICc");
    const double r = std::max(rss, n * 1e-300);
    return n * std::log(r / n) + 2.0 * k + 2.0 * k * (k + 1) / (n - k - 1);
}

FitResult fit_energy_growth(const EnergyCurve& curve, FitWindow window) {
    std::vector<double> t, y;
    select_window(curve, window, t, y);
    if (t.size() < 8) throw DomainError("energy fit needs at least 8 points in the window");
    for (double v : y)
        if (!(v > 0.0)) throw DomainError("energy fit needs positive mean energies");

    // Profile over the alpha grid.
    const int steps = static_cast<int>(std::lround((kAlphaHi - kAlphaLo) / kAlphaStep));
    std::vector<double> profile(static_cast<std::size_t>(steps) + 1);
    std::size_t best = 0;
    for (int i = 0; i <= steps; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        profile[iu] = nnls2(t, y, kAlphaLo + kAlphaStep * i).rss;
        if (profile[iu] < profile[best]) best = iu;
    }

    // Golden-section refinement on the bracketing grid cells.
    double lo = kAlphaLo + kAlphaStep * static_cast<double>(best == 0 ? 0 : best - 1);
    double hi = kAlphaLo + kAlphaStep * static_cast<double>(std::min<std::size_t>(best + 1, profile.size() - 1));
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = nnls2(t, y, a).rss, fb = nnls2(t, y, b).rss;
    while (hi - lo > 1e-9) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = nnls2(t, y, a).rss;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = nnls2(t, y, b).rss;
        }
    }
    double alpha = 0.5 * (lo + hi);
    Amplitudes amp = nnls2(t, y, alpha);
    if (profile[best] < amp.rss) {
        alpha = kAlphaLo + kAlphaStep * static_cast<double>(best);
        amp = nnls2(t, y, alpha);
    }

    FitResult fit;
    fit.model = "A0*t+A1*t^alpha";
    fit.rss = amp.rss;
    fit.t_min = t.front();
    fit.t_max = t.back();
    fit.n_points = static_cast<int>(t.size());
    const double n = static_cast<double>(t.size());

    // The power-law term is unidentifiable when it carries no weight at the
    // window end.
    const double tmax = t.back();
    const double power_part = amp.A1 * std::pow(tmax, alpha);
    const double total = amp.A0 * tmax + power_part;
    fit.alpha_unidentifiable = !(power_part > 1e-6 * total);

    if (fit.alpha_unidentifiable) {
        double tt = 0.0;
        for (double v : t) tt += v * v;
        const double s2 = amp.rss / (n - 1.0);
        fit.params = {{"A0", amp.A0, std::sqrt(s2 / tt)}, {"A1", amp.A1, kInf}, {"alpha", kNaN, kInf}};
        fit.aicc = aicc(amp.rss, fit.n_points, 1);
        return fit;
    }

    std::array<std::array<double, 3>, 3> jtj{}, cov{};
    for (double ti : t) {
        const double g = std::pow(ti, alpha);
        const std::array<double, 3> row{ti, g, amp.A1 * g * std::log(ti)};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) jtj[r][c] += row[r] * row[c];
    }
    const double s2 = amp.rss / (n - 3.0);
    std::array<double, 3> sig{kInf, kInf, kInf};
    if (invert3(jtj, cov))
        for (int i = 0; i < 3; ++i) sig[i] = std::sqrt(std::max(0.0, s2 * cov[i][i]));
    fit.params = {{"A0", amp.A0, sig[0]}, {"A1", amp.A1, sig[1]}, {"alpha", alpha, sig[2]}};
    fit.aicc = aicc(amp.rss, fit.n_points, 3);
    return fit;
}

FitResult fit_power_law(const EnergyCurve& curve, FitWindow window) {
    double e0 = 0.0;
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        if (curve.times[i] == 0) e0 = curve.mean_E[i];

    std::vector<double> t, y;
    select_window(curve, window, t, y);
    if (t.size() < 3) throw DomainError("power-law fit needs at least 3 points in the window");
    std::vector<double> lx(t.size()), ly(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double growth = y[i] - e0;
        if (!(growth > 0.0)) throw DomainError("power-law fit needs E(t) > E(0) throughout the window");
        lx[i] = std::log(t[i]);
        ly[i] = std::log(growth);
    }
    const Line l = fit_line(lx, ly);
    FitResult fit;
    fit.model = "c*t^gamma";
    fit.params = {{"c", std::exp(l.intercept), std::exp(l.intercept) * l.sigma_intercept},
                  {"gamma", l.slope, l.sigma_slope}};
    fit.rss = l.rss;
    fit.t_min = t.front();
    fit.t_max = t.back();
    fit.n_points = static_cast<int>(t.size());
    fit.aicc = fit.n_points > 4 ? aicc(l.rss, fit.n_points, 2) : kNaN;
    return fit;
}

DecayFit fit_f0_decay(std::span<const double> times, std::span<const double> f0) {
    if (times.size() != f0.size()) throw DomainError("times and f0 differ in length");
    if (times.size() < 8) throw DomainError("f0 decay fit needs at least 8 points");
    std::vector<double> lt(times.size()), lf(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(f0[i] > 0.0)) throw DomainError("f0 must be positive");
        if (!(times[i] > 0.0)) throw DomainError("f0 decay times must be positive");
        lt[i] = std::log(times[i]);
        lf[i] = std::log(f0[i]);
    }
    const Line ex = fit_line(times, lf);
    const Line pl = fit_line(lt, lf);
    const int n = static_cast<int>(times.size());
    const double t_lo = *std::min_element(times.begin(), times.end());
    const double t_hi = *std::max_element(times.begin(), times.end());

    DecayFit d;
    d.exponential.model = "exponential";
    d.exponential.params = {{"log_c", ex.intercept, ex.sigma_intercept}, {"rate", -ex.slope, ex.sigma_slope}};
    d.exponential.rss = ex.rss;
    d.exponential.aicc = aicc(ex.rss, n, 2);
    d.power_law.model = "power_law";
    d.power_law.params = {{"log_c", pl.intercept, pl.sigma_intercept}, {"exponent", -pl.slope, pl.sigma_slope}};
    d.power_law.rss = pl.rss;
    d.power_law.aicc = aicc(pl.rss, n, 2);
    for (auto* f : {&d.exponential, &d.power_law}) {
        f->t_min = t_lo;
        f->t_max = t_hi;
        f->n_points = n;
    }
    d.preferred = d.exponential.aicc <= d.power_law.aicc ? DecayModel::Exponential : DecayModel::PowerLaw;
    return d;
}

DecayFit fit_f0_decay(const F0Series& series, FitWindow window) {
    std::vector<double> t, f;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double ti = series.times[i];
        if (ti > 0.0 && ti >= window.t_min && ti <= window.t_max) {
            t.push_back(ti);
            f.push_back(series.mean[i]);
        }
    }
    return fit_f0_decay(t, f);
}

ProfileClass classify_profile(const MomentumProfile& profile, double floor) {
    if (profile.p_values.size() != profile.f.size()) throw DomainError("profile vectors differ in length");
    const double total = std::accumulate(profile.f.begin(), profile.f.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-6) throw DomainError("profile is not normalized");

    std::vector<double> ap, p2, lf;
    for (std::size_t i = 0; i < profile.f.size(); ++i) {
        if (profile.f[i] >= floor) {
            const double p = profile.p_values[i];
            ap.push_back(std::fabs(p));
            p2.push_back(p * p);
            lf.push_back(std::log(profile.f[i]));
        }
    }
    if (ap.size() < 10) throw DomainError("profile has fewer than 10 bins above the floor");

    const Line ex = fit_line(ap, lf);
    const Line ga = fit_line(p2, lf);
    ProfileClass c{};
    c.xi = ex.slope < 0.0 ? -1.0 / ex.slope : kInf;
    c.sigma = ga.slope < 0.0 ? std::sqrt(-0.5 / ga.slope) : kInf;
    c.rss_exponential = ex.rss;
    c.rss_gaussian = ga.rss;
    c.bins_used = static_cast<int>(ap.size());
    c.shape = ex.rss <= ga.rss ? ProfileShape::Exponential : ProfileShape::Gaussian;
    c.width = c.shape == ProfileShape::Exponential ? c.xi : c.sigma;
    return c;
}

const char* to_string(DecayModel m) { return m == DecayModel::Exponential ? "exponential" : "power_law"; }
const char* to_string(ProfileShape s) { return s == ProfileShape::Exponential ? "exponential" : "gaussian"; }

}  // namespace lkr
