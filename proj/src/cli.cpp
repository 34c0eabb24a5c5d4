#include "springcool/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "springcool/closed_form.hpp"
#include "springcool/oracle.hpp"
#include "springcool/quantum_noise.hpp"
#include "springcool/random_suite.hpp"
#include "springcool/spectra.hpp"
#include "springcool/stability.hpp"

namespace springcool::cli {

namespace {

using nlohmann::json;

// CODATA: k_B and h are exact SI defining constants.
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kPlanck = 6.62607015e-34;
constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);

[[noreturn]] void config_fail(const std::string& path, const std::string& why) {
    throw ConfigError("config." + path + ": " + why);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) config_fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

double require_number(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) config_fail(path + "." + key, "missing required key");
    if (!obj[key].is_number()) config_fail(path + "." + key, "must be a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) config_fail(path + "." + key, "must be a number");
    return obj[key].get<double>();
}

Command parse_command(const std::string& name) {
    if (name == "eval") return Command::Eval;
    if (name == "spectrum") return Command::Spectrum;
    if (name == "verify") return Command::Verify;
    if (name == "sweep") return Command::Sweep;
    if (name == "thresholds") return Command::Thresholds;
    config_fail("command", "unknown command '" + name + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ConvergenceError(std::string("non-finite value for ") + what +
                               "; refusing to emit a poisoned row");
    }
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : ncols_(header.size()) {
        append_row(header);
    }
    void append(const std::vector<double>& row) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double v : row) {
            check_finite(v, "csv cell");
            cells.push_back(fmt(v));
        }
        if (cells.size() != ncols_) throw IoError("csv row width mismatch");
        append_row(cells);
    }
    const std::string& str() const { return body_; }

private:
    void append_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += "\r\n";  // RFC 4180
    }
    std::string body_;
    std::size_t ncols_;
};

void write_artifact(const RunConfig& config, const std::string& content) {
    if (!config.output_path) {
        std::cout << content;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(*config.output_path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename to " + target.string() + " failed: " + ec.message());
}

json cooling_json(const CoolingResult& r) {
    for (double v : {r.x_var, r.p_var, r.n_eff, r.purity, r.omega_eff, r.gamma_eff}) {
        check_finite(v, "cooling result");
    }
    return {{"x_var", r.x_var},         {"p_var", r.p_var},   {"n_eff", r.n_eff},
            {"purity", r.purity},       {"omega_eff", r.omega_eff},
            {"gamma_eff", r.gamma_eff}, {"stable", r.stable}};
}

json budget_json(const PhononBudget& b) {
    return {{"n_ba", b.n_ba},
            {"n_imp", b.n_imp},
            {"n_cor", b.n_cor},
            {"n_th_eff", b.n_th_eff},
            {"cq", b.cq}};
}

json stability_json(const StabilityReport& s) {
    return {{"stable", s.stable},
            {"gfb_min", s.gfb_min},
            {"gfb_min_paper", s.gfb_min_paper},
            {"slack_s1", s.slack_s1},
            {"slack_s2", s.slack_s2},
            {"slack_a3", s.slack_a3},
            {"slack_rh", s.slack_rh}};
}

std::vector<double> log_grid(double lo, double hi, int points_per_decade) {
    if (!(lo > 0.0 && hi > lo)) throw ConfigError("grid bounds must satisfy 0 < min < max");
    const double decades = std::log10(hi / lo);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] =
            lo * std::pow(10.0, decades * static_cast<double>(i) / (n - 1));
    }
    return grid;
}

int run_eval(const RunConfig& config) {
    const CoolingResult cooling = purity_closed_form(config.sys);
    const PhononBudget budget = phonon_budget(config.sys);
    const StabilityReport stab = check_stability(config.sys);
    const NeffDecomposition dec = neff_decomposition(config.sys);
    json out = {{"cooling", cooling_json(cooling)},
                {"budget", budget_json(budget)},
                {"stability", stability_json(stab)},
                {"neff_decomposition",
                 {{"thermal_ba_term", dec.thermal_ba_term},
                  {"imprecision_term", dec.imprecision_term},
                  {"correlation_term", dec.correlation_term},
                  {"mu_inv_three_term", dec.mu_inv_three_term},
                  {"mu_inv_lambda_form", dec.mu_inv_lambda_form},
                  {"ba_residual", dec.ba_residual}}}};
    write_artifact(config, out.dump(2) + "\n");
    return 0;
}

int run_spectrum(const RunConfig& config) {
    const SystemParams& sys = config.sys;
    const EffectiveOscillator eff = effective_oscillator(sys);
    const double lo = config.spectrum.omega_min.value_or(
        0.01 * std::min(sys.fb.omega_h, eff.omega_eff));
    const double hi = config.spectrum.omega_max.value_or(
        100.0 * std::max(sys.fb.omega_l, eff.omega_eff));
    const std::vector<double> omegas = log_grid(lo, hi, config.spectrum.points_per_decade);
    const ThermalModel model = config.spectrum.structural_thermal ? ThermalModel::ExactStructural
                                                                  : ThermalModel::Frozen;
    const auto points = spectrum_grid(sys, omegas, model);

    CsvWriter csv({"omega", "omega_over_sql0", "s_total", "s_thermal", "s_backaction",
                   "s_fed_imprecision", "s_correlation"});
    const double sql0 = sys.readout.omega_sql0;
    for (const auto& pt : points) {
        csv.append({pt.omega, sql0 > 0.0 ? pt.omega / sql0 : 0.0, pt.s_total, pt.s_thermal,
                    pt.s_backaction, pt.s_fed_imprecision, pt.s_correlation});
    }
    write_artifact(config, csv.str());
    return 0;
}

int run_verify(const RunConfig& config) {
    const auto suite = random_stable_suite(config.seed, config.verify.count);
    const auto records = verify_batch(suite, config.tol);

    double max_rel = 0.0;
    CsvWriter csv({"index", "q0", "nth0", "omega_sql0", "delta", "theta", "eta", "omega_h",
                   "omega_l", "gfb", "rel_x", "rel_p", "rel_neff", "n_evals"});
    for (std::size_t i = 0; i < records.size(); ++i) {
        const SystemParams& s = suite[i];
        const ComparisonRecord& r = records[i];
        max_rel = std::max({max_rel, r.rel_x, r.rel_p, r.rel_neff});
        csv.append({static_cast<double>(i), s.osc.q0, s.osc.nth0, s.readout.omega_sql0,
                    s.readout.delta, s.readout.theta, s.readout.eta, s.fb.omega_h, s.fb.omega_l,
                    s.fb.gfb, r.rel_x, r.rel_p, r.rel_neff, static_cast<double>(r.quad.n_evals)});
    }
    write_artifact(config, csv.str());
    std::cerr << "verify: " << records.size() << " configurations, max relative discrepancy "
              << fmt(max_rel) << "\n";
    if (max_rel >= 1e-6) {
        std::ostringstream msg;
        msg << "verification failed: max closed-form/quadrature discrepancy " << max_rel
            << " >= 1e-6";
        throw ConvergenceError(msg.str());
    }
    return 0;
}

int run_sweep(const RunConfig& config) {
    PlantParams plant;
    plant.osc = config.sys.osc;
    plant.eta = config.sys.readout.eta;
    plant.kappa = config.sys.readout.kappa;
    const std::vector<double> grid =
        log_grid(config.sweep.cq_min, config.sweep.cq_max, config.sweep.points_per_decade);
    const SweepResult sweep =
        sweep_cooperativity(plant, grid, config.bounds, config.sweep.budget, config.seed);

    CsvWriter csv({"cq_sql", "purity_free", "purity_phase_fixed", "purity_phase_resonant",
                   "omega_h_opt", "omega_l_opt", "delta_opt", "theta_opt",
                   "omega_h_opt_over_sql0", "omega_l_opt_over_sql0", "omega_eff_free",
                   "omega_eff_free_over_sql0", "gamma_eff_free", "n_eff_free", "omega_sql0"});
    for (const SweepPoint& pt : sweep.points) {
        const SystemParams& best = pt.free_angle.sys;
        csv.append({pt.cq_sql, pt.free_angle.result.purity, pt.phase_fixed.result.purity,
                    pt.phase_resonant.result.purity, best.fb.omega_h, best.fb.omega_l,
                    best.readout.delta, best.readout.theta, best.fb.omega_h / pt.omega_sql0,
                    best.fb.omega_l / pt.omega_sql0, pt.free_angle.result.omega_eff,
                    pt.free_angle.result.omega_eff / pt.omega_sql0,
                    pt.free_angle.result.gamma_eff, pt.free_angle.result.n_eff, pt.omega_sql0});
    }
    write_artifact(config, csv.str());
    return 0;
}

int run_thresholds(const RunConfig& config) {
    const GroundStateThresholds t =
        ground_state_thresholds(config.sys.osc, config.sys.readout);
    json out = {{"n_imp_max", t.n_imp_max}, {"q0_min", t.q0_min}, {"qf_min", t.qf_min}};
    if (config.si_frequency_hz) {
        out["qf_min_hz"] = t.q0_min * (*config.si_frequency_hz);
    }
    write_artifact(config, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::Instability: return 3;
        case ErrorCategory::Convergence: return 4;
        case ErrorCategory::Io: return 5;
    }
    return 1;
}

RunConfig parse_config(const std::string& text) { return parse_config(text, ""); }

RunConfig parse_config(const std::string& text, const std::string& command_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    check_keys(doc, "", {"command", "output", "format", "seed", "tol", "oscillator", "readout",
                         "feedback", "si", "spectrum", "verify", "sweep", "bounds"});

    RunConfig config;

    std::string cmd = command_name;
    if (doc.contains("command")) {
        if (!doc["command"].is_string()) config_fail("command", "must be a string");
        const std::string from_doc = doc["command"].get<std::string>();
        if (!cmd.empty() && cmd != from_doc) {
            config_fail("command", "'" + from_doc + "' conflicts with command-line '" + cmd + "'");
        }
        cmd = from_doc;
    }
    if (cmd.empty()) config_fail("command", "missing (set it in the config or on the command line)");
    config.command = parse_command(cmd);

    if (doc.contains("output")) {
        if (!doc["output"].is_string()) config_fail("output", "must be a string");
        config.output_path = doc["output"].get<std::string>();
    }
    if (doc.contains("format")) {
        const std::string f = doc["format"].is_string() ? doc["format"].get<std::string>() : "";
        if (f == "json") config.format = OutputFormat::Json;
        else if (f == "csv") config.format = OutputFormat::Csv;
        else config_fail("format", "must be 'csv' or 'json'");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) config_fail("seed", "must be a non-negative integer");
        config.seed = doc["seed"].get<std::uint64_t>();
    }
    config.tol = number_or(doc, "", "tol", config.tol);
    if (!(config.tol >= 1e-12 && config.tol <= 1e-3)) config_fail("tol", "must be in [1e-12, 1e-3]");

    const bool needs_system = config.command == Command::Eval ||
                              config.command == Command::Spectrum ||
                              config.command == Command::Sweep ||
                              config.command == Command::Thresholds;

    if (doc.contains("oscillator")) {
        const json& osc = doc["oscillator"];
        check_keys(osc, "oscillator", {"q0", "nth0"});
        config.sys.osc.q0 = require_number(osc, "oscillator", "q0");
        config.sys.osc.nth0 = number_or(osc, "oscillator", "nth0", -1.0);
        config.has_system = true;
    } else if (needs_system) {
        config_fail("oscillator", "missing required section");
    }

    if (doc.contains("readout")) {
        const json& ro = doc["readout"];
        check_keys(ro, "readout", {"omega_sql0", "delta", "theta", "eta", "kappa"});
        config.sys.readout.omega_sql0 =
            number_or(ro, "readout", "omega_sql0", config.sys.readout.omega_sql0);
        config.sys.readout.delta = number_or(ro, "readout", "delta", config.sys.readout.delta);
        config.sys.readout.theta = number_or(ro, "readout", "theta", config.sys.readout.theta);
        config.sys.readout.eta = number_or(ro, "readout", "eta", config.sys.readout.eta);
        config.sys.readout.kappa = number_or(ro, "readout", "kappa", config.sys.readout.kappa);
    }

    if (doc.contains("feedback")) {
        const json& fb = doc["feedback"];
        check_keys(fb, "feedback", {"omega_h", "omega_l", "gfb"});
        config.sys.fb.omega_h = require_number(fb, "feedback", "omega_h");
        config.sys.fb.omega_l = require_number(fb, "feedback", "omega_l");
        config.sys.fb.gfb = number_or(fb, "feedback", "gfb", 0.0);
    } else if (config.command == Command::Eval || config.command == Command::Spectrum) {
        config_fail("feedback", "missing required section");
    }

    if (doc.contains("si")) {
        const json& si = doc["si"];
        check_keys(si, "si", {"mass_kg", "frequency_hz", "temperature_k", "cavity_linewidth_hz",
                              "sql_frequency_hz"});
        const double f0 = require_number(si, "si", "frequency_hz");
        if (!(f0 > 0.0)) config_fail("si.frequency_hz", "must be > 0");
        config.si_frequency_hz = f0;
        if (si.contains("mass_kg") && !(require_number(si, "si", "mass_kg") > 0.0)) {
            config_fail("si.mass_kg", "must be > 0");
        }
        if (si.contains("temperature_k")) {
            if (config.sys.osc.nth0 >= 0.0) {
                config_fail("oscillator.nth0", "conflicts with si.temperature_k");
            }
            const double temp = require_number(si, "si", "temperature_k");
            if (!(temp >= 0.0)) config_fail("si.temperature_k", "must be >= 0");
            config.sys.osc.nth0 = kBoltzmann * temp / (kHbar * 2.0 * std::numbers::pi * f0);
        }
        if (si.contains("cavity_linewidth_hz")) {
            config.sys.readout.kappa = require_number(si, "si", "cavity_linewidth_hz") / f0;
        }
        if (si.contains("sql_frequency_hz")) {
            config.sys.readout.omega_sql0 = require_number(si, "si", "sql_frequency_hz") / f0;
        }
    }
    if (config.has_system && config.sys.osc.nth0 < 0.0) {
        config_fail("oscillator.nth0", "missing (set it directly or via si.temperature_k)");
    }

    if (doc.contains("spectrum")) {
        const json& sp = doc["spectrum"];
        check_keys(sp, "spectrum", {"omega_min", "omega_max", "points_per_decade", "thermal_model"});
        if (sp.contains("omega_min")) config.spectrum.omega_min = require_number(sp, "spectrum", "omega_min");
        if (sp.contains("omega_max")) config.spectrum.omega_max = require_number(sp, "spectrum", "omega_max");
        config.spectrum.points_per_decade = static_cast<int>(
            number_or(sp, "spectrum", "points_per_decade", config.spectrum.points_per_decade));
        if (sp.contains("thermal_model")) {
            const std::string m = sp["thermal_model"].is_string()
                                      ? sp["thermal_model"].get<std::string>()
                                      : "";
            if (m == "frozen") config.spectrum.structural_thermal = false;
            else if (m == "structural") config.spectrum.structural_thermal = true;
            else config_fail("spectrum.thermal_model", "must be 'frozen' or 'structural'");
        }
    }
    if (doc.contains("verify")) {
        const json& v = doc["verify"];
        check_keys(v, "verify", {"count"});
        config.verify.count = static_cast<int>(number_or(v, "verify", "count", 100));
        if (config.verify.count < 1) config_fail("verify.count", "must be >= 1");
    }
    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        check_keys(sw, "sweep", {"cq_min", "cq_max", "points_per_decade", "budget"});
        config.sweep.cq_min = number_or(sw, "sweep", "cq_min", config.sweep.cq_min);
        config.sweep.cq_max = number_or(sw, "sweep", "cq_max", config.sweep.cq_max);
        config.sweep.points_per_decade = static_cast<int>(
            number_or(sw, "sweep", "points_per_decade", config.sweep.points_per_decade));
        config.sweep.budget = static_cast<int>(number_or(sw, "sweep", "budget", config.sweep.budget));
        if (!(config.sweep.cq_min > 0.0 && config.sweep.cq_max > config.sweep.cq_min)) {
            config_fail("sweep", "requires 0 < cq_min < cq_max");
        }
    }
    if (doc.contains("bounds")) {
        const json& b = doc["bounds"];
        check_keys(b, "bounds", {"corner_lo", "corner_hi", "gamma_lo", "delta_max"});
        config.bounds.corner_lo = number_or(b, "bounds", "corner_lo", config.bounds.corner_lo);
        config.bounds.corner_hi = number_or(b, "bounds", "corner_hi", config.bounds.corner_hi);
        config.bounds.gamma_lo = number_or(b, "bounds", "gamma_lo", config.bounds.gamma_lo);
        config.bounds.delta_max = number_or(b, "bounds", "delta_max", config.bounds.delta_max);
    }

    // Model-level invariants surface here with field paths; feedback ordering
    // errors name both offending fields.
    if (config.has_system && config.command != Command::Verify) {
        if (config.command == Command::Eval || config.command == Command::Spectrum) {
            config.sys.validate();
        } else {
            config.sys.osc.validate();
            config.sys.readout.validate();
        }
    }
    return config;
}

int run(const RunConfig& config) {
    switch (config.command) {
        case Command::Eval: return run_eval(config);
        case Command::Spectrum: return run_spectrum(config);
        case Command::Verify: return run_verify(config);
        case Command::Sweep: return run_sweep(config);
        case Command::Thresholds: return run_thresholds(config);
    }
    return 1;
}

}  // namespace springcool::cli
