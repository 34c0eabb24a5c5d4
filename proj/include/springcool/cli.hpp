#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "springcool/model.hpp"
#include "springcool/optimizer.hpp"

// Front-end plumbing: a flat JSON configuration file selects one command and
// carries the dimensionless parameter groups (or an SI block that is
// converted to them at ingestion). Outputs are deterministic: identical
// config and seed give byte-identical files. Files are written atomically
// (temp + rename). Exit codes: 0 ok, 2 config, 3 instability, 4 convergence,
// 5 io.

namespace springcool::cli {

enum class Command { Eval, Spectrum, Verify, Sweep, Thresholds };

enum class OutputFormat { Json, Csv };

struct SpectrumOptions {
    std::optional<double> omega_min;
    std::optional<double> omega_max;
    int points_per_decade = 200;
    bool structural_thermal = false;
};

struct VerifyOptions {
    int count = 100;
};

struct SweepOptions {
    double cq_min = 1e-2;
    double cq_max = 1e2;
    int points_per_decade = 25;
    int budget = 10000;
};

struct RunConfig {
    Command command = Command::Eval;
    SystemParams sys;
    bool has_system = false;
    SpectrumOptions spectrum;
    VerifyOptions verify;
    SweepOptions sweep;
    OptimizerBounds bounds;
    std::optional<std::string> output_path;
    std::optional<OutputFormat> format;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::optional<double> si_frequency_hz;  ///< kept for SI-unit columns in outputs
};

/// Parse and validate a config document. All model-level invariants are
/// checked here with field-path messages. Unknown keys are errors.
RunConfig parse_config(const std::string& text);

/// Same, with the command (and optional overrides) coming from the command line.
RunConfig parse_config(const std::string& text, const std::string& command_name);

/// Execute the command; writes the artifact to config.output_path (or stdout)
/// and returns 0. Failures are reported by throwing springcool::Error.
int run(const RunConfig& config);

/// Map an error category onto the documented process exit code.
int exit_code(ErrorCategory category);

}  // namespace springcool::cli
