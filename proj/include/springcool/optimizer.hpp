#pragma once

#include <cstdint>
#include <vector>

#include "springcool/closed_form.hpp"
#include "springcool/model.hpp"

// Purity maximization over the five control parameters
//   {Omega_H, Omega_L, Gamma_fb, delta, theta}
// at fixed plant (Q0, nth0, eta, kappa) and fixed input power expressed as
// the quantum cooperativity at the zero-detuning SQL frequency. Corners and
// gain are searched in log coordinates, detuning and angle linearly, with a
// deterministic multi-start Nelder-Mead simplex; candidates violating bounds,
// the corner ordering or closed-loop stability are rejected outright rather
// than penalized. Identical seeds and budgets give bit-identical results
// regardless of thread count: per-start searches are independent and merged
// by start index.

namespace springcool {

struct PlantParams {
    OscillatorParams osc;
    double eta = 1.0;
    double kappa = 1e3;
};

enum class ReadoutMode {
    FreeAngle,      ///< all five parameters free
    PhaseFixed,     ///< theta pinned to pi/2, detuning free
    PhaseResonant,  ///< theta pinned to pi/2, delta pinned to 0
};

struct OptimizerBounds {
    double corner_lo = 1e-2;  ///< lower corner bound, units of omega_sql0
    double corner_hi = 1e3;   ///< upper corner bound, units of omega_sql0
    double gamma_lo = 1e-8;   ///< lower Gamma_fb bound, units of omega_sql0
    double delta_max = 2.0;
    double theta_margin = 1e-3;       ///< theta in [margin*pi, (1-margin)*pi]
    double min_corner_ratio = 1.001;  ///< Omega_L/Omega_H floor on every candidate
};

struct OptimizationProblem {
    PlantParams plant;
    double cq_sql = 1.0;
    ReadoutMode mode = ReadoutMode::FreeAngle;
    OptimizerBounds bounds;
    int budget = 10000;         ///< objective evaluations per optimize_purity call
    std::uint64_t seed = 1;
    int n_random_starts = 8;
    std::vector<std::vector<double>> extra_starts;  ///< warm starts in raw coordinates
};

struct OptimumPoint {
    SystemParams sys;
    CoolingResult result;
    std::vector<double> coords;  ///< raw search coordinates of the optimum
    std::uint64_t n_evals = 0;
};

struct SweepPoint {
    double cq_sql = 0.0;
    double omega_sql0 = 0.0;
    OptimumPoint free_angle;
    OptimumPoint phase_fixed;
    OptimumPoint phase_resonant;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

/// Zero-detuning SQL frequency realizing the requested C_Q,SQL:
/// omega_sql0 = omega0 * (4 nth0 cq / q0)^(1/3), the inversion of
/// coupling_to_cq below. Requires nth0 > 0 and cq_sql >= 0.
double cq_to_coupling(const PlantParams& plant, double cq_sql);

/// C_Q at the zero-detuning SQL frequency: with structural damping the
/// back-action occupation S_FF^rp/(2 w Gamma0[w]) is frequency independent,
/// so C_Q[w] = n_ba * w/(nth0 omega0) evaluated at w = omega_sql0 gives
/// q0 * omega_sql0^3 / (4 nth0 omega0^3).
double coupling_to_cq(const PlantParams& plant, double omega_sql0);

OptimumPoint optimize_purity(const OptimizationProblem& problem);

/// Purity sweep over a cooperativity grid, all three readout modes per point,
/// warm-starting each mode from the previous point's optimum. The warm starts
/// are added to the fixed random-start schedule, so a warm-started point can
/// never do worse than the cold restart with the same seed.
SweepResult sweep_cooperativity(const PlantParams& plant, const std::vector<double>& cq_grid,
                                const OptimizerBounds& bounds, int budget_per_point,
                                std::uint64_t seed);

}  // namespace springcool
