#include "lkr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "lkr/classical_engine.hpp"
#include "lkr/errors.hpp"
#include "lkr/quantum_engine.hpp"
#include "lkr/theory.hpp"

namespace lkr {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, ExperimentKind>& experiment_names() {
    static const std::map<std::string, ExperimentKind> names = {
        {"energy_growth", ExperimentKind::EnergyGrowth},
        {"momentum_profiles", ExperimentKind::MomentumProfiles},
        {"f0_decay", ExperimentKind::F0Decay},
        {"classical_section", ExperimentKind::ClassicalSection},
        {"theory_overlay", ExperimentKind::TheoryOverlay}};
    return names;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Splits one CSV data line into numbers.
std::vector<double> parse_row(const std::string& line, const fs::path& path) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            row.push_back(std::stod(cell, &used));
            if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos)
                throw std::invalid_argument(cell);
        } catch (const std::logic_error&) {
            throw std::runtime_error("malformed number '" + cell + "' in " + path.string());
        }
    }
    return row;
}

std::vector<std::vector<double>> read_table(const fs::path& path, const std::string& header,
                                            std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    bool header_seen = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != header) throw std::runtime_error(path.string() + ": expected header '" + header + "'");
            header_seen = true;
            continue;
        }
        auto row = parse_row(line, path);
        if (row.size() != columns) throw std::runtime_error("wrong column count in " + path.string());
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw std::runtime_error(path.string() + " has no header");
    return rows;
}

FitResult decay_with_flag(FitResult fit, bool selected) {
    fit.params.push_back({"selected", selected ? 1.0 : 0.0, 0.0});
    return fit;
}

FitResult profile_fit(const ProfileClass& pc, int t) {
    FitResult fit;
    fit.model = "profile_t" + std::to_string(t);
    fit.params = {{"xi", pc.xi, 0.0},
                  {"sigma", pc.sigma, 0.0},
                  {"gaussian_selected", pc.shape == ProfileShape::Gaussian ? 1.0 : 0.0, 0.0}};
    fit.rss = pc.shape == ProfileShape::Gaussian ? pc.rss_gaussian : pc.rss_exponential;
    fit.aicc = std::nan("");
    fit.n_points = pc.bins_used;
    fit.t_min = fit.t_max = t;
    return fit;
}

void energy_fits(const EnergyCurve& curve, FitWindow window, std::vector<FitResult>& fits,
                 std::vector<std::string>& notes) {
    try {
        fits.push_back(fit_energy_growth(curve, window));
    } catch (const DomainError& e) {
        notes.push_back(std::string("energy growth fit skipped: ") + e.what());
    }
    try {
        fits.push_back(fit_power_law(curve, window));
    } catch (const DomainError& e) {
        notes.push_back(std::string("power-law fit skipped: ") + e.what());
    }
}

void decay_fits(const F0Series& series, std::vector<FitResult>& fits, std::vector<std::string>& notes) {
    try {
        const DecayFit d = fit_f0_decay(series);
        fits.push_back(decay_with_flag(d.exponential, d.preferred == DecayModel::Exponential));
        fits.push_back(decay_with_flag(d.power_law, d.preferred == DecayModel::PowerLaw));
    } catch (const DomainError& e) {
        notes.push_back(std::string("f0 decay fit skipped: ") + e.what());
    }
}

}  // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::EnergyGrowth: return "energy_growth";
        case ExperimentKind::MomentumProfiles: return "momentum_profiles";
        case ExperimentKind::F0Decay: return "f0_decay";
        case ExperimentKind::ClassicalSection: return "classical_section";
        case ExperimentKind::TheoryOverlay: return "theory_overlay";
    }
    return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
    const auto it = experiment_names().find(name);
    if (it == experiment_names().end()) {
        std::string known;
        for (const auto& [k, v] : experiment_names()) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("experiment", "unknown experiment '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["experiment"] = experiment;
    j["started_utc"] = started_utc;
    j["wall_seconds"] = wall_seconds;
    j["workers"] = workers;
    j["master_seed"] = master_seed;
    j["config"] = config_text;
    j["artifacts"] = artifacts;
    j["notes"] = notes;
    j["seeds"] = seeds;
    return j.dump(2) + "\n";
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_energy_csv(const fs::path& path, const EnergyCurve& curve) {
    auto out = open_out(path);
    out << "t,mean_E,std_E,n_realizations\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        out << curve.times[i] << ',' << format_number(curve.mean_E[i]) << ','
            << format_number(curve.std_E[i]) << ',' << curve.n_realizations << '\n';
    close_out(out, path);
}

void write_f0_csv(const fs::path& path, const F0Series& series) {
    auto out = open_out(path);
    out << "t,f0,f0_std\n";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        out << series.times[i] << ',' << format_number(series.mean[i]) << ','
            << format_number(series.std[i]) << '\n';
    close_out(out, path);
}

void write_profile_csv(const fs::path& path, const MomentumProfile& profile) {
    auto out = open_out(path);
    out << "p,f\n";
    for (std::size_t i = 0; i < profile.p_values.size(); ++i)
        out << format_number(profile.p_values[i]) << ',' << format_number(profile.f[i]) << '\n';
    close_out(out, path);
}

void write_fit_csv(const fs::path& path, const std::vector<FitResult>& fits) {
    auto out = open_out(path);
    out << "model,param,value,sigma\n";
    for (const auto& f : fits) {
        for (const auto& p : f.params)
            out << f.model << ',' << p.name << ',' << format_number(p.value) << ','
                << format_number(p.sigma) << '\n';
        out << f.model << ",rss," << format_number(f.rss) << ",0\n";
        out << f.model << ",aicc," << format_number(f.aicc) << ",0\n";
        out << f.model << ",t_min," << format_number(f.t_min) << ",0\n";
        out << f.model << ",t_max," << format_number(f.t_max) << ",0\n";
        out << f.model << ",n_points," << f.n_points << ",0\n";
        if (f.model == "A0*t+A1*t^alpha")
            out << f.model << ",alpha_unidentifiable," << (f.alpha_unidentifiable ? 1 : 0) << ",0\n";
    }
    close_out(out, path);
}

EnergyCurve read_energy_csv(const fs::path& path) {
    EnergyCurve c;
    for (const auto& r : read_table(path, "t,mean_E,std_E,n_realizations", 4)) {
        c.times.push_back(static_cast<int>(std::lround(r[0])));
        c.mean_E.push_back(r[1]);
        c.std_E.push_back(r[2]);
        c.n_realizations = static_cast<int>(std::lround(r[3]));
    }
    return c;
}

F0Series read_f0_csv(const fs::path& path) {
    F0Series s;
    for (const auto& r : read_table(path, "t,f0,f0_std", 3)) {
        s.times.push_back(static_cast<int>(std::lround(r[0])));
        s.mean.push_back(r[1]);
        s.std.push_back(r[2]);
    }
    return s;
}

std::vector<FitResult> refit_directory(const fs::path& dir, FitWindow window) {
    std::vector<FitResult> fits;
    std::vector<std::string> notes;
    const fs::path energy = dir / "energy_curve.csv";
    const fs::path f0 = dir / "f0.csv";
    if (!fs::exists(energy) && !fs::exists(f0))
        throw std::runtime_error("no energy_curve.csv or f0.csv in " + dir.string());
    if (fs::exists(energy)) {
        fits.push_back(fit_energy_growth(read_energy_csv(energy), window));
        fits.push_back(fit_power_law(read_energy_csv(energy), window));
    }
    if (fs::exists(f0)) decay_fits(read_f0_csv(f0), fits, notes);
    if (!notes.empty()) throw DomainError(notes.front());
    write_fit_csv(dir / "fit.csv", fits);
    return fits;
}

RunManifest run_experiment(const ExperimentSpec& spec, RunConfig config, const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    if (spec.seed_override) config.sim.master_seed = *spec.seed_override;
    if (spec.workers < 1) throw ConfigError("workers", "must be >= 1");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory " + out_dir.string());

    RunManifest m;
    m.version = kVersion;
    m.experiment = to_string(spec.kind);
    m.started_utc = utc_now();
    m.workers = spec.workers;
    m.master_seed = config.sim.master_seed;
    m.config_text = config.to_text();

    std::vector<FitResult> fits;
    auto emit = [&](const std::string& name) { m.artifacts.push_back(name); };

    switch (spec.kind) {
        case ExperimentKind::EnergyGrowth:
        case ExperimentKind::MomentumProfiles:
        case ExperimentKind::F0Decay: {
            const EnsembleResult r = ensemble_run(config.sim, spec.workers);
            m.seeds = r.seeds;
            if (spec.kind == ExperimentKind::EnergyGrowth) {
                write_energy_csv(out_dir / "energy_curve.csv", r.energy);
                emit("energy_curve.csv");
                energy_fits(r.energy, config.fit_window, fits, m.notes);
            } else if (spec.kind == ExperimentKind::MomentumProfiles) {
                for (const auto& p : r.profiles) {
                    const std::string name = "profile_" + std::to_string(p.time) + ".csv";
                    write_profile_csv(out_dir / name, p);
                    emit(name);
                    try {
                        fits.push_back(profile_fit(classify_profile(p), p.time));
                    } catch (const DomainError& e) {
                        m.notes.push_back("profile at t=" + std::to_string(p.time) +
                                          " not classified: " + e.what());
                    }
                }
            } else {
                write_f0_csv(out_dir / "f0.csv", r.f0);
                emit("f0.csv");
                decay_fits(r.f0, fits, m.notes);
            }
            break;
        }
        case ExperimentKind::ClassicalSection: {
            const ClassicalEnsembleConfig cc = config.classical();
            const ClassicalResult r = classical_ensemble(cc, spec.workers);
            m.seeds.resize(static_cast<std::size_t>(cc.n_particles));
            for (std::size_t i = 0; i < m.seeds.size(); ++i) m.seeds[i] = realization_seed(cc.master_seed, i);

            const fs::path sec = out_dir / "section.csv";
            auto out = open_out(sec);
            out << "x,p,t\n";
            for (const auto& s : r.section)
                out << format_number(s.x) << ',' << format_number(s.p) << ',' << s.t << '\n';
            close_out(out, sec);
            emit("section.csv");
            write_energy_csv(out_dir / "energy_curve.csv", r.energy);
            emit("energy_curve.csv");
            try {
                fits.push_back(fit_power_law(r.energy, config.fit_window));
            } catch (const DomainError& e) {
                m.notes.push_back(std::string("power-law fit skipped: ") + e.what());
            }
            break;
        }
        case ExperimentKind::TheoryOverlay: {
            const auto* levy = std::get_if<noise::Levy>(&config.sim.noise);
            if (!levy) throw ConfigError("noise", "theory_overlay needs noise = levy");
            TheoryParams tp = TheoryParams::from_physics(levy->alpha, config.sim.K, config.sim.hbar_s);
            tp.A0 = config.A0;
            tp.A1 = config.A1;
            tp.A2 = config.A2;
            tp.t_b = config.t_b;

            const fs::path path = out_dir / "theory.csv";
            auto out = open_out(path);
            out << "t,D,predicted_E\n";
            bool limit = false;
            for (int t = 0; t <= config.sim.horizon; ++t) {
                const Decoherence d = decoherence_factor(t, tp);
                limit = limit || d.limit_case;
                out << t << ',' << format_number(d.value) << ','
                    << (t >= 1 ? format_number(predicted_energy(t, tp)) : std::string("nan")) << '\n';
            }
            close_out(out, path);
            emit("theory.csv");
            m.notes.push_back("q = " + format_number(tp.q));
            if (limit) m.notes.push_back("alpha = 1: decoherence evaluated in the exponential limit");
            break;
        }
    }

    if (!fits.empty()) {
        write_fit_csv(out_dir / "fit.csv", fits);
        emit("fit.csv");
    }
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path manifest = out_dir / "manifest.json";
    auto out = open_out(manifest);
    out << m.to_json();
    close_out(out, manifest);
    return m;
}

RunManifest run_experiment(const ExperimentSpec& spec, const fs::path& config_path, const fs::path& out_dir) {
    return run_experiment(spec, load_config(config_path), out_dir);
}

}  // namespace lkr
