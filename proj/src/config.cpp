#include "lkr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lkr/errors.hpp"

namespace lkr {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_int_list(const std::string& text, std::vector<int>& out) {
    out.clear();
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        int v = 0;
        if (!parse_number(trim(item), v)) return false;
        out.push_back(v);
    }
    return true;
}

enum class NoiseName { Periodic, Levy, Stn, Amplitude };

struct Draft {
    RunConfig cfg;
    NoiseName noise = NoiseName::Periodic;
    std::optional<double> alpha, delta_max, eps_max;
};

using Setter = std::function<bool(Draft&, const std::string&)>;

template <typename T>
Setter number_into(T RunConfig::*member) {
    return [member](Draft& d, const std::string& v) { return parse_number(v, d.cfg.*member); };
}

template <typename T>
Setter sim_number_into(T SimConfig::*member) {
    return [member](Draft& d, const std::string& v) { return parse_number(v, d.cfg.sim.*member); };
}

Setter optional_into(std::optional<double> Draft::*member) {
    return [member](Draft& d, const std::string& v) {
        double x = 0.0;
        if (!parse_number(v, x)) return false;
        d.*member = x;
        return true;
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"K", sim_number_into(&SimConfig::K)},
        {"hbar_s", sim_number_into(&SimConfig::hbar_s)},
        {"grid_M", sim_number_into(&SimConfig::grid_M)},
        {"horizon", sim_number_into(&SimConfig::horizon)},
        {"ensemble_size", sim_number_into(&SimConfig::ensemble_size)},
        {"master_seed", sim_number_into(&SimConfig::master_seed)},
        {"initial_sigma_p", sim_number_into(&SimConfig::initial_sigma_p)},
        {"beta_spread", sim_number_into(&SimConfig::beta_spread)},
        {"record_times",
         [](Draft& d, const std::string& v) { return parse_int_list(v, d.cfg.sim.record_times); }},
        {"noise",
         [](Draft& d, const std::string& v) {
             static const std::map<std::string, NoiseName> names = {
                 {"periodic", NoiseName::Periodic},
                 {"levy", NoiseName::Levy},
                 {"stn", NoiseName::Stn},
                 {"amplitude", NoiseName::Amplitude}};
             const auto it = names.find(v);
             if (it == names.end()) return false;
             d.noise = it->second;
             return true;
         }},
        {"alpha", optional_into(&Draft::alpha)},
        {"delta_max", optional_into(&Draft::delta_max)},
        {"eps_max", optional_into(&Draft::eps_max)},
        {"n_particles", number_into(&RunConfig::n_particles)},
        {"classical_sigma_p", number_into(&RunConfig::classical_sigma_p)},
        {"section_particles", number_into(&RunConfig::section_particles)},
        {"fit_t_min", [](Draft& d, const std::string& v) { return parse_number(v, d.cfg.fit_window.t_min); }},
        {"fit_t_max", [](Draft& d, const std::string& v) { return parse_number(v, d.cfg.fit_window.t_max); }},
        {"A0", number_into(&RunConfig::A0)},
        {"A1", number_into(&RunConfig::A1)},
        {"A2", number_into(&RunConfig::A2)},
        {"t_b", number_into(&RunConfig::t_b)},
        {"experiment",
         [](Draft& d, const std::string& v) {
             if (v.empty()) return false;
             d.cfg.experiment = v;
             return true;
         }},
    };
    return table;
}

void check_ranges(const Draft& d, std::vector<ConfigViolation>& out) {
    const RunConfig& c = d.cfg;
    const SimConfig& s = c.sim;
    auto bad = [&](const char* field, const char* msg) { out.push_back({field, msg}); };
    auto finite = [](double x) { return std::isfinite(x); };

    if (!(s.K >= 0.0 && finite(s.K))) bad("K", "must be finite and >= 0");
    if (!(s.hbar_s > 0.0 && finite(s.hbar_s))) bad("hbar_s", "must be positive");
    if (s.grid_M < 1) bad("grid_M", "must be >= 1");
    if (s.horizon < 1) bad("horizon", "must be >= 1");
    if (s.ensemble_size < 1) bad("ensemble_size", "must be >= 1");
    if (!(s.initial_sigma_p > 0.0 && finite(s.initial_sigma_p))) bad("initial_sigma_p", "must be positive");
    if (!(s.beta_spread >= 0.0 && finite(s.beta_spread))) bad("beta_spread", "must be >= 0");
    if (s.record_times.empty())
        bad("record_times", "must not be empty");
    else if (!std::is_sorted(s.record_times.begin(), s.record_times.end()))
        bad("record_times", "must be sorted ascending");
    else if (s.record_times.front() < 0 || s.record_times.back() > s.horizon)
        bad("record_times", "entries must lie in [0, horizon]");

    switch (d.noise) {
        case NoiseName::Periodic: break;
        case NoiseName::Levy:
            if (!d.alpha)
                bad("alpha", "required for noise = levy");
            else if (!(*d.alpha > 0.0 && finite(*d.alpha)))
                bad("alpha", "must be positive");
            break;
        case NoiseName::Stn:
            if (!d.delta_max)
                bad("delta_max", "required for noise = stn");
            else if (!(*d.delta_max > 0.0 && *d.delta_max < 1.0))
                bad("delta_max", "must lie in (0, 1)");
            break;
        case NoiseName::Amplitude:
            if (!d.eps_max)
                bad("eps_max", "required for noise = amplitude");
            else if (!(*d.eps_max > 0.0 && *d.eps_max < 1.0))
                bad("eps_max", "must lie in (0, 1)");
            break;
    }

    if (c.n_particles < 1) bad("n_particles", "must be >= 1");
    if (!(c.classical_sigma_p >= 0.0 && finite(c.classical_sigma_p))) bad("classical_sigma_p", "must be >= 0");
    if (c.section_particles < 0) bad("section_particles", "must be >= 0");
    if (!(c.fit_window.t_min >= 0.0 && finite(c.fit_window.t_min))) bad("fit_t_min", "must be finite and >= 0");
    if (!(c.fit_window.t_max > c.fit_window.t_min)) bad("fit_t_max", "must exceed fit_t_min");
    if (!(c.A0 >= 0.0 && finite(c.A0))) bad("A0", "must be finite and >= 0");
    if (!(c.A1 >= 0.0 && finite(c.A1))) bad("A1", "must be finite and >= 0");
    if (!(c.A2 >= 0.0 && finite(c.A2))) bad("A2", "must be finite and >= 0");
    if (!(c.t_b > 0.0 && finite(c.t_b))) bad("t_b", "must be positive");
}

Draft parse(const std::string& text, std::vector<ConfigViolation>& out) {
    Draft d;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            out.push_back({"line " + std::to_string(line_no), "expected key = value"});
            continue;
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            out.push_back({key, "unknown key"});
            continue;
        }
        if (!seen.insert(key).second) {
            out.push_back({key, "given more than once"});
            continue;
        }
        if (!it->second(d, value)) out.push_back({key, "cannot parse value '" + value + "'"});
    }
    check_ranges(d, out);

    switch (d.noise) {
        case NoiseName::Periodic: d.cfg.sim.noise = noise::Periodic{}; break;
        case NoiseName::Levy: d.cfg.sim.noise = noise::Levy{d.alpha.value_or(0.0)}; break;
        case NoiseName::Stn: d.cfg.sim.noise = noise::StationaryTiming{d.delta_max.value_or(0.0)}; break;
        case NoiseName::Amplitude: d.cfg.sim.noise = noise::Amplitude{d.eps_max.value_or(0.0)}; break;
    }
    return d;
}

std::string fmt(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

}  // namespace

ClassicalEnsembleConfig RunConfig::classical() const {
    ClassicalEnsembleConfig c;
    c.K = sim.K;
    c.noise = sim.noise;
    c.horizon = sim.horizon;
    c.n_particles = n_particles;
    c.master_seed = sim.master_seed;
    c.sigma_p = classical_sigma_p;
    c.record_times = sim.record_times;
    c.section_particles = section_particles;
    return c;
}

std::string RunConfig::to_text() const {
    std::ostringstream o;
    o << "K = " << fmt(sim.K) << "\n"
      << "hbar_s = " << fmt(sim.hbar_s) << "\n"
      << "grid_M = " << sim.grid_M << "\n"
      << "horizon = " << sim.horizon << "\n";
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, noise::Periodic>)
                o << "noise = periodic\n";
            else if constexpr (std::is_same_v<M, noise::Levy>)
                o << "noise = levy\nalpha = " << fmt(m.alpha) << "\n";
            else if constexpr (std::is_same_v<M, noise::StationaryTiming>)
                o << "noise = stn\ndelta_max = " << fmt(m.delta_max) << "\n";
            else
                o << "noise = amplitude\neps_max = " << fmt(m.eps_max) << "\n";
        },
        sim.noise);
    o << "ensemble_size = " << sim.ensemble_size << "\n"
      << "master_seed = " << sim.master_seed << "\n"
      << "initial_sigma_p = " << fmt(sim.initial_sigma_p) << "\n"
      << "beta_spread = " << fmt(sim.beta_spread) << "\n"
      << "record_times = ";
    for (std::size_t i = 0; i < sim.record_times.size(); ++i)
        o << (i ? "," : "") << sim.record_times[i];
    o << "\n"
      << "n_particles = " << n_particles << "\n"
      << "classical_sigma_p = " << fmt(classical_sigma_p) << "\n"
      << "section_particles = " << section_particles << "\n"
      << "fit_t_min = " << fmt(fit_window.t_min) << "\n"
      << "fit_t_max = " << fmt(fit_window.t_max) << "\n"
      << "A0 = " << fmt(A0) << "\n"
      << "A1 = " << fmt(A1) << "\n"
      << "A2 = " << fmt(A2) << "\n"
      << "t_b = " << fmt(t_b) << "\n";
    if (experiment) o << "experiment = " << *experiment << "\n";
    return o.str();
}

std::vector<ConfigViolation> check_config_text(const std::string& text) {
    std::vector<ConfigViolation> out;
    parse(text, out);
    return out;
}

RunConfig parse_config_text(const std::string& text) {
    std::vector<ConfigViolation> out;
    Draft d = parse(text, out);
    if (!out.empty()) throw ConfigError(out.front().field, out.front().message);
    return d.cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path)) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw std::runtime_error("error reading " + path.string());
    return ss.str();
}

std::vector<ConfigViolation> validate_config(const std::filesystem::path& path) {
    return check_config_text(read_text_file(path));
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config_text(read_text_file(path));
}

}  // namespace lkr
