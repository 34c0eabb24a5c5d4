#include "springcool/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "springcool/random_suite.hpp"
#include "springcool/stability.hpp"

namespace springcool {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int dims_for(ReadoutMode mode) {
    switch (mode) {
        case ReadoutMode::FreeAngle: return 5;
        case ReadoutMode::PhaseFixed: return 4;
        case ReadoutMode::PhaseResonant: return 3;
    }
    return 5;
}

// Coordinates: [log10(Omega_H/omega_sql0), log10(Omega_L/Omega_H),
// log10(Gamma_fb/omega_sql0), delta, theta], truncated to the mode's free
// prefix. Corners are kept in SQL-frequency units so warm starts transfer
// across sweep points with different input power; the second coordinate is
// the corner ratio so narrow-band filters are axis-aligned for the simplex.
struct Objective {
    const PlantParams* plant;
    const OptimizerBounds* bounds;
    double omega_sql0;
    ReadoutMode mode;
    mutable std::uint64_t evals = 0;

    bool build(const std::vector<double>& x, SystemParams& sys) const {
        const double wh = std::pow(10.0, x[0]) * omega_sql0;
        const double wl = wh * std::pow(10.0, x[1]);
        const double gamma_fb = std::pow(10.0, x[2]) * omega_sql0;
        const double delta = mode == ReadoutMode::PhaseResonant ? 0.0 : x[3];
        const double theta = mode == ReadoutMode::FreeAngle ? x[4] : std::numbers::pi / 2.0;

        const double c_lo = bounds->corner_lo * omega_sql0;
        const double c_hi = bounds->corner_hi * omega_sql0;
        if (!(wh >= c_lo && wh <= c_hi && wl >= c_lo && wl <= c_hi)) return false;
        if (!(wl >= wh * bounds->min_corner_ratio)) return false;
        if (!(gamma_fb >= bounds->gamma_lo * omega_sql0 && gamma_fb <= wl / 3.0)) return false;
        if (!(std::abs(delta) <= bounds->delta_max)) return false;
        const double margin = bounds->theta_margin * std::numbers::pi;
        if (!(theta >= margin && theta <= std::numbers::pi - margin)) return false;

        sys.osc = plant->osc;
        sys.readout = {omega_sql0, delta, theta, plant->eta, plant->kappa};
        sys.fb.omega_h = wh;
        sys.fb.omega_l = wl;
        sys.fb.gfb = gamma_fb * wh / (plant->osc.omega0 * plant->osc.omega0);
        return true;
    }

    /// Inverse purity to minimize; +inf for rejected candidates.
    double operator()(const std::vector<double>& x) const {
        ++evals;
        SystemParams sys;
        if (!build(x, sys)) return kInf;
        try {
            if (!check_stability(sys).stable) return kInf;
            const CoolingResult r = purity_closed_form(sys);
            return std::isfinite(r.n_eff) ? 2.0 * r.n_eff + 1.0 : kInf;
        } catch (const Error&) {
            return kInf;
        }
    }
};

struct NmResult {
    std::vector<double> x;
    double f = kInf;
};

/// Standard Nelder-Mead with reflection/expansion/contraction/shrink;
/// infeasible points carry +inf and get reflected away.
NmResult nelder_mead(const Objective& obj, const std::vector<double>& start,
                     const std::vector<double>& steps, std::uint64_t max_evals) {
    const std::size_t n = start.size();
    const std::uint64_t eval_start = obj.evals;
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= n; ++i) fv[i] = obj(simplex[i]);

    auto order = [&]() {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return fv[a] < fv[b];
        });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fv[idx[i]];
        }
        simplex.swap(s2);
        fv.swap(f2);
    };

    while (obj.evals - eval_start < max_evals) {
        order();
        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t d = 0; d < n; ++d) {
                diam = std::max(diam, std::abs(simplex[i][d] - simplex[0][d]));
            }
        }
        if (diam < 1e-10 && std::isfinite(fv[0])) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) {
                p[d] = centroid[d] + coef * (simplex[n][d] - centroid[d]);
            }
            return p;
        };

        const std::vector<double> xr = blend(-1.0);
        const double fr = obj(xr);
        if (fr < fv[0]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = obj(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            const double coef = fr < fv[n] ? -0.5 : 0.5;
            const std::vector<double> xc = blend(coef);
            const double fc = obj(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t d = 0; d < n; ++d) {
                        simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
                    }
                    fv[i] = obj(simplex[i]);
                }
            }
        }
    }
    order();
    return {simplex[0], fv[0]};
}

std::vector<double> random_start(const Objective& obj, std::uint64_t seed, int start_index,
                                 int n_starts) {
    SplitMix64 rng(seed ^ (0xA24BAED4963EE407ULL + 0x9E3779B97F4A7C15ULL *
                                                       static_cast<std::uint64_t>(start_index)));
    const OptimizerBounds& b = *obj.bounds;
    const double lo = std::log10(b.corner_lo);
    const double hi = std::log10(b.corner_hi);
    // Even start indices stratify the detuning over [0, delta_max]: the
    // blue-detuned spring basin is narrow and easy to miss with uniform draws.
    const bool stratified = start_index % 2 == 0 && n_starts > 1;
    const double delta_fixed =
        b.delta_max * static_cast<double>(start_index) / std::max(1, n_starts - 1);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> x(5);
        x[0] = lo + (hi - lo) * rng.uniform();
        x[1] = 0.1 + 2.9 * rng.uniform();  // log10 corner ratio
        const double g_hi = x[0] + x[1] - std::log10(3.0);
        const double g_lo = std::log10(b.gamma_lo);
        x[2] = g_lo + (g_hi - g_lo) * rng.uniform();
        x[3] = stratified ? delta_fixed : b.delta_max * (2.0 * rng.uniform() - 1.0);
        x[4] = std::numbers::pi * (b.theta_margin + (1.0 - 2.0 * b.theta_margin) * rng.uniform());
        x.resize(static_cast<std::size_t>(dims_for(obj.mode)));
        if (std::isfinite(obj(x))) return x;
    }
    // No feasible draw; return the last attempt and let the search reject it.
    std::vector<double> x(static_cast<std::size_t>(dims_for(obj.mode)), 0.0);
    x[0] = lo;
    x[1] = 1.0;
    x[2] = std::log10(b.gamma_lo);
    if (x.size() > 3) x[3] = 0.0;
    if (x.size() > 4) x[4] = std::numbers::pi / 2.0;
    return x;
}

}  // namespace

double cq_to_coupling(const PlantParams& plant, double cq_sql) {
    if (!(plant.osc.nth0 > 0.0)) throw ConfigError("cq_to_coupling: nth0 must be > 0");
    if (!(cq_sql >= 0.0)) throw ConfigError("cq_to_coupling: cq_sql must be >= 0");
    return plant.osc.omega0 * std::cbrt(4.0 * plant.osc.nth0 * cq_sql / plant.osc.q0);
}

double coupling_to_cq(const PlantParams& plant, double omega_sql0) {
    if (!(plant.osc.nth0 > 0.0)) throw ConfigError("coupling_to_cq: nth0 must be > 0");
    const double r = omega_sql0 / plant.osc.omega0;
    return plant.osc.q0 * r * r * r / (4.0 * plant.osc.nth0);
}

OptimumPoint optimize_purity(const OptimizationProblem& problem) {
    if (problem.budget < 1000) throw ConfigError("optimize_purity: budget must be >= 1000");
    problem.plant.osc.validate();
    const double omega_sql0 = cq_to_coupling(problem.plant, problem.cq_sql);

    Objective obj;
    obj.plant = &problem.plant;
    obj.bounds = &problem.bounds;
    obj.omega_sql0 = omega_sql0;
    obj.mode = problem.mode;

    const int dims = dims_for(problem.mode);
    std::vector<std::vector<double>> starts;
    for (int k = 0; k < problem.n_random_starts; ++k) {
        starts.push_back(random_start(obj, problem.seed, k, problem.n_random_starts));
    }
    for (const auto& extra : problem.extra_starts) {
        if (static_cast<int>(extra.size()) == dims) starts.push_back(extra);
    }

    // Fixed per-start allotment with two slots reserved for warm starts:
    // a warm-started call then replays the random starts identically and can
    // only add candidates, so it never loses to the cold restart.
    const std::uint64_t per_start = static_cast<std::uint64_t>(problem.budget) /
                                    static_cast<std::uint64_t>(problem.n_random_starts + 2);
    std::vector<double> steps = {0.25, 0.25, 0.25, 0.2, 0.1};
    steps.resize(static_cast<std::size_t>(dims));

    std::vector<NmResult> results(starts.size());
    std::vector<std::uint64_t> used(starts.size(), 0);
    const std::int64_t n_starts = static_cast<std::int64_t>(starts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < n_starts; ++k) {
        Objective local = obj;  // private eval counter per start
        local.evals = 0;
        results[static_cast<std::size_t>(k)] =
            nelder_mead(local, starts[static_cast<std::size_t>(k)], steps, per_start);
        used[static_cast<std::size_t>(k)] = local.evals;
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < results.size(); ++k) {
        if (results[k].f < results[best].f) best = k;
    }
    std::uint64_t total = 0;
    for (std::uint64_t u : used) total += u;

    if (!std::isfinite(results[best].f)) {
        std::ostringstream msg;
        msg << "optimize_purity: no feasible stable point found within bounds (cq_sql = "
            << problem.cq_sql << ", budget = " << problem.budget << ")";
        throw ConvergenceError(msg.str());
    }

    std::vector<double> x_best = results[best].x;
    if (problem.mode == ReadoutMode::FreeAngle) {
        // The conditionally optimal angle is closed-form; substituting it can
        // only improve the incumbent and pins theta-stationarity exactly.
        SystemParams sys;
        if (obj.build(x_best, sys)) {
            std::vector<double> x_polish = x_best;
            x_polish[4] = optimal_angle(sys);
            if (obj(x_polish) <= results[best].f) x_best = x_polish;
        }
        total += obj.evals;
    }

    OptimumPoint out;
    if (!obj.build(x_best, out.sys)) {
        throw ConvergenceError("optimize_purity: internal error rebuilding optimum");
    }
    out.result = purity_closed_form(out.sys);
    out.coords = x_best;
    out.n_evals = total;
    return out;
}

SweepResult sweep_cooperativity(const PlantParams& plant, const std::vector<double>& cq_grid,
                                const OptimizerBounds& bounds, int budget_per_point,
                                std::uint64_t seed) {
    SweepResult sweep;
    sweep.points.reserve(cq_grid.size());
    std::vector<double> warm_free, warm_fixed, warm_resonant;

    for (std::size_t i = 0; i < cq_grid.size(); ++i) {
        if (i > 0 && !(cq_grid[i] > cq_grid[i - 1])) {
            throw ConfigError("sweep_cooperativity: cq_grid must be strictly increasing");
        }
        SweepPoint pt;
        pt.cq_sql = cq_grid[i];
        pt.omega_sql0 = cq_to_coupling(plant, pt.cq_sql);

        auto run_mode = [&](ReadoutMode mode, std::vector<double>& warm,
                            const std::vector<std::vector<double>>& extra) {
            OptimizationProblem prob;
            prob.plant = plant;
            prob.cq_sql = pt.cq_sql;
            prob.mode = mode;
            prob.bounds = bounds;
            prob.budget = budget_per_point;
            prob.seed = seed + static_cast<std::uint64_t>(i) * 0x10001ULL;
            if (!warm.empty()) prob.extra_starts.push_back(warm);
            for (const auto& e : extra) prob.extra_starts.push_back(e);
            OptimumPoint opt = optimize_purity(prob);
            warm = opt.coords;
            return opt;
        };
        pt.phase_resonant = run_mode(ReadoutMode::PhaseResonant, warm_resonant, {});
        pt.phase_fixed = run_mode(ReadoutMode::PhaseFixed, warm_fixed, {});
        // Seed the free-angle search with the phase-fixed optimum (theta
        // lifted to pi/2): a restriction's optimum is always feasible for the
        // full problem, so free-angle purity is bounded below by phase-fixed.
        std::vector<double> lifted = pt.phase_fixed.coords;
        lifted.push_back(std::numbers::pi / 2.0);
        pt.free_angle = run_mode(ReadoutMode::FreeAngle, warm_free, {lifted});
        sweep.points.push_back(std::move(pt));
    }
    return sweep;
}

}  // namespace springcool
