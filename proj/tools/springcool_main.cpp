#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "springcool/cli.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw springcool::IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-limited feedback cooling of a structurally damped oscillator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    std::uint64_t seed = 0;
    bool seed_set = false, out_set = false, format_set = false, tol_set = false;
    double tol = 1e-9;

    const std::vector<std::string> commands = {"eval", "spectrum", "verify", "sweep", "thresholds"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the JSON configuration")->required();
        sub->add_option("--out", out_path)->each([&](const std::string&) { out_set = true; });
        sub->add_option("--format", format)->each([&](const std::string&) { format_set = true; });
        sub->add_option("--seed", seed)->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--tol", tol)->each([&](const std::string&) { tol_set = true; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        springcool::cli::RunConfig config = springcool::cli::parse_config(slurp(config_path), command);
        if (out_set) config.output_path = out_path;
        if (seed_set) config.seed = seed;
        if (tol_set) {
            if (!(tol >= 1e-12 && tol <= 1e-3)) {
                throw springcool::ConfigError("--tol must be in [1e-12, 1e-3]");
            }
            config.tol = tol;
        }
        if (format_set) {
            if (format == "json") config.format = springcool::cli::OutputFormat::Json;
            else if (format == "csv") config.format = springcool::cli::OutputFormat::Csv;
            else throw springcool::ConfigError("--format must be 'csv' or 'json'");
        }
        return springcool::cli::run(config);
    } catch (const springcool::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return springcool::cli::exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
