#include "springcool/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "springcool/spectra.hpp"
#include "springcool/stability.hpp"

namespace springcool {

namespace {

void check_tol(double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-3)) {
        std::ostringstream msg;
        msg << "oracle tolerance " << tol << " outside [1e-12, 1e-3]";
        throw ConfigError(msg.str());
    }
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7/15.
//
// Node and weight constants come from Boost.Math (ascending positive
// abscissas, centre first; the embedded Gauss nodes sit at even Kronrod
// indices). The panel error estimate follows QUADPACK's qk15: |K15-G7|
// sharpened against the deviation integral resasc and floored at the
// roundoff level of the panel's |f| integral, so it scales correctly with
// panel width. A global heap refines the worst panel until the accumulated
// estimate meets the relative tolerance or the evaluation budget runs out.
// ---------------------------------------------------------------------------

struct Panel {
    double a, b;
    double value, err, resabs;
    bool tail;  // integrated in u = 1/omega coordinates
};

struct PanelOrder {
    bool operator()(const Panel& lhs, const Panel& rhs) const {
        if (lhs.err != rhs.err) return lhs.err < rhs.err;  // largest error on top
        if (lhs.a != rhs.a) return lhs.a < rhs.a;
        return lhs.tail < rhs.tail;
    }
};

constexpr std::uint64_t kEvalBudget = 2'000'000;  // per variance integral

template <typename F>
Panel eval_panel(const F& f, double a, double b, bool tail) {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    const double fc = f(c);
    double resk = wk[0] * fc;
    double resg = wg[0] * fc;
    double resabs = wk[0] * std::abs(fc);
    fv[0] = fc;
    for (std::size_t i = 1; i < 8; ++i) {
        const double dx = xk[i] * h;
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        fv[2 * i - 1] = f1;
        fv[2 * i] = f2;
        resk += wk[i] * (f1 + f2);
        resabs += wk[i] * (std::abs(f1) + std::abs(f2));
        if (i % 2 == 0) resg += wg[i / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = wk[0] * std::abs(fc - reskh);
    for (std::size_t i = 1; i < 8; ++i) {
        resasc += wk[i] * (std::abs(fv[2 * i - 1] - reskh) + std::abs(fv[2 * i] - reskh));
    }

    Panel p;
    p.a = a;
    p.b = b;
    p.tail = tail;
    p.value = resk * h;
    p.resabs = resabs * h;
    const double resasc_h = resasc * h;
    double err = std::abs(resk - resg) * h;
    if (resasc_h != 0.0 && err != 0.0) {
        err = resasc_h * std::min(1.0, std::pow(200.0 * err / resasc_h, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    err = std::max(err, 50.0 * eps * p.resabs);
    p.err = err;
    return p;
}

struct Accumulated {
    double value = 0.0;
    double err = 0.0;
    std::uint64_t evals = 0;
};

/// Integrate f over the breakpoint segments plus the 1/omega-substituted tail
/// beyond the last breakpoint. f must decay at least as omega^-2 so the tail
/// integrand f(1/u)/u^2 stays bounded; Kronrod nodes are interior, u = 0 is
/// never evaluated.
template <typename F>
Accumulated integrate_with_tail(const F& f, const std::vector<double>& pts, double tol) {
    Accumulated acc;
    const auto f_tail = [&f](double u) { return f(1.0 / u) / (u * u); };

    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
    double total_value = 0.0;
    double total_err = 0.0;
    auto push = [&](Panel&& p) {
        total_value += p.value;
        total_err += p.err;
        heap.push(p);
        acc.evals += 15;
    };

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        push(eval_panel(f, pts[i], pts[i + 1], false));
    }
    push(eval_panel(f_tail, 0.0, 1.0 / pts.back(), true));

    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (total_err > tol * std::abs(total_value) && acc.evals + 30 <= kEvalBudget) {
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 8.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            break;  // cannot subdivide further at double precision
        }
        heap.pop();
        total_value -= worst.value;
        total_err -= worst.err;
        if (worst.tail) {
            push(eval_panel(f_tail, worst.a, mid, true));
            push(eval_panel(f_tail, mid, worst.b, true));
        } else {
            push(eval_panel(f, worst.a, mid, false));
            push(eval_panel(f, mid, worst.b, false));
        }
    }
    acc.value = total_value;
    acc.err = total_err;
    return acc;
}

/// Breakpoints that resolve the filter corners and bracket the resonance in
/// geometrically growing shells of the damping width, so no segment spans
/// an unbounded dynamic range.
std::vector<double> breakpoints(const SpectrumContext& ctx, double omega_min, double omega_cut) {
    std::vector<double> pts{omega_min, omega_cut};
    auto add = [&](double w) {
        if (w > omega_min && w < omega_cut) pts.push_back(w);
    };
    add(ctx.sys.fb.omega_h);
    add(ctx.sys.fb.omega_l);
    const double we = ctx.eff.omega_eff;
    const double width = std::max(std::abs(ctx.eff.gamma_eff), 1e-14 * we);
    add(we);
    for (double k = 0.5; k * width < 4.0 * omega_cut; k *= 4.0) {
        add(we - k * width);
        add(we + k * width);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

QuadratureReport integrate_impl(const SystemParams& sys, ThermalModel model, double omega_min,
                                double tol) {
    check_tol(tol);
    sys.validate();
    const StabilityReport stab = check_stability(sys);
    if (!stab.stable) {
        std::ostringstream msg;
        msg << "oracle: configuration unstable (s1 = " << stab.slack_s1 << ", s2 = " << stab.slack_s2
            << ", a3 = " << stab.slack_a3 << ", s1*s2 - a3 = " << stab.slack_rh
            << "); the variance integrals do not describe a steady state";
        throw InstabilityError(msg.str());
    }

    const SpectrumContext ctx = make_spectrum_context(sys);
    const auto s_xx = [&](double w) { return displacement_psd(ctx, w, model).s_total; };
    const auto s_pp = [&](double w) { return w * w * displacement_psd(ctx, w, model).s_total; };

    const double omega_cut =
        10.0 * std::max({sys.fb.omega_l, ctx.eff.omega_eff + 128.0 * std::abs(ctx.eff.gamma_eff),
                         sys.osc.omega0});
    const std::vector<double> pts = breakpoints(ctx, omega_min, omega_cut);

    const Accumulated x = integrate_with_tail(s_xx, pts, tol);
    const Accumulated p = integrate_with_tail(s_pp, pts, tol);

    QuadratureReport rep;
    rep.x_var = x.value / std::numbers::pi;  // 2 * (1/2pi), even integrand
    rep.p_var = p.value / std::numbers::pi;
    rep.x_abs_err = x.err / std::numbers::pi;
    rep.p_abs_err = p.err / std::numbers::pi;
    rep.n_evals = x.evals + p.evals;
    rep.converged = rep.x_abs_err <= tol * std::abs(rep.x_var) &&
                    rep.p_abs_err <= tol * std::abs(rep.p_var);
    if (!std::isfinite(rep.x_var) || !std::isfinite(rep.p_var) ||
        rep.x_abs_err > 100.0 * tol * std::abs(rep.x_var) ||
        rep.p_abs_err > 100.0 * tol * std::abs(rep.p_var)) {
        std::ostringstream msg;
        msg << "quadrature failed to converge: x_var = " << rep.x_var << " +- " << rep.x_abs_err
            << ", p_var = " << rep.p_var << " +- " << rep.p_abs_err << " after " << rep.n_evals
            << " evaluations (tol " << tol << ")";
        throw ConvergenceError(msg.str());
    }
    return rep;
}

}  // namespace

QuadratureReport integrate_variances(const SystemParams& sys, double tol) {
    // The frozen-mode integrand is finite at DC, so the half line starts at 0.
    return integrate_impl(sys, ThermalModel::Frozen, 0.0, tol);
}

QuadratureReport integrate_variances_structural(const SystemParams& sys, double omega_min,
                                                double tol) {
    if (!(omega_min > 0.0)) {
        throw ConfigError("integrate_variances_structural: omega_min must be > 0 "
                          "(structural thermal noise diverges logarithmically at DC)");
    }
    return integrate_impl(sys, ThermalModel::ExactStructural, omega_min, tol);
}

ComparisonRecord verify_closed_form(const SystemParams& sys, double tol) {
    ComparisonRecord rec;
    rec.quad = integrate_variances(sys, tol);
    rec.closed = purity_closed_form(sys);
    const double we = rec.closed.omega_eff;
    const double neff_quad = 0.5 * (we * rec.quad.x_var + rec.quad.p_var / we - 1.0);
    auto rel = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
    };
    rec.rel_x = rel(rec.closed.x_var, rec.quad.x_var);
    rec.rel_p = rel(rec.closed.p_var, rec.quad.p_var);
    rec.rel_neff = rel(rec.closed.n_eff, neff_quad);
    return rec;
}

std::vector<ComparisonRecord> verify_batch_serial(std::span<const SystemParams> configs,
                                                  double tol) {
    std::vector<ComparisonRecord> out(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) out[i] = verify_closed_form(configs[i], tol);
    return out;
}

std::vector<ComparisonRecord> verify_batch(std::span<const SystemParams> configs, double tol) {
    std::vector<ComparisonRecord> out(configs.size());
    const std::int64_t n = static_cast<std::int64_t>(configs.size());
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                verify_closed_form(configs[static_cast<std::size_t>(i)], tol);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace springcool
