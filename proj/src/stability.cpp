#include "springcool/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace springcool {

namespace {

struct CubicCoeffs {
    double s1, s2, a3;
    double omega_eff_sq;
};

CubicCoeffs closed_loop_cubic(const SystemParams& sys) {
    const OpticalSpring rp = optical_spring(sys.readout);
    const FeedbackSpring fbs = feedback_spring(sys.osc, sys.fb);
    CubicCoeffs c;
    c.omega_eff_sq =
        sys.osc.omega0 * sys.osc.omega0 + rp.omega_rp_sq + sys.fb.omega_h * fbs.gamma_fb;
    const double gamma0 =
        c.omega_eff_sq > 0.0 ? gamma_structural(sys.osc, std::sqrt(c.omega_eff_sq)) : 0.0;
    const double gamma_eff = gamma0 + rp.gamma_rp + fbs.gamma_fb;
    c.s1 = sys.fb.omega_l + gamma0 + rp.gamma_rp;
    c.s2 = c.omega_eff_sq + sys.fb.omega_l * gamma_eff - sys.fb.omega_h * fbs.gamma_fb;
    c.a3 = sys.fb.omega_l * c.omega_eff_sq;
    return c;
}

bool stable_verdict(const CubicCoeffs& c) {
    return c.s1 > 0.0 && c.s2 > 0.0 && c.a3 > 0.0 && c.s1 * c.s2 - c.a3 > 0.0;
}

bool stable_at_gain(SystemParams sys, double gfb) {
    sys.fb.gfb = gfb;
    return stable_verdict(closed_loop_cubic(sys));
}

double minimum_stabilizing_gain(const SystemParams& sys) {
    if (stable_at_gain(sys, 0.0)) return 0.0;
    // Gain only adds damping and spring here, so the verdict is monotone in
    // gfb for fixed corners; bracket on a log grid, then bisect.
    double lo = 0.0, hi = -1.0;
    for (double g = 1e-12; g <= 1e12; g *= 10.0) {
        if (stable_at_gain(sys, g)) {
            hi = g;
            break;
        }
        lo = g;
    }
    if (hi < 0.0) return std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stable_at_gain(sys, mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

StabilityReport check_stability(const SystemParams& sys) {
    const CubicCoeffs c = closed_loop_cubic(sys);
    StabilityReport r;
    r.slack_s1 = c.s1;
    r.slack_s2 = c.s2;
    r.slack_a3 = c.a3;
    r.slack_rh = c.s1 * c.s2 - c.a3;
    r.stable = stable_verdict(c);
    r.gfb_min = minimum_stabilizing_gain(sys);
    const double gamma_rp = optical_spring(sys.readout).gamma_rp;
    r.gfb_min_paper =
        std::max(0.0, -gamma_rp * sys.fb.omega_l * sys.fb.omega_h /
                          (sys.osc.omega0 * sys.osc.omega0 * (sys.fb.omega_l - sys.fb.omega_h)));
    return r;
}

std::array<std::complex<double>, 3> solve_cubic(double a, double b, double c) {
    using C = std::complex<double>;
    // Depress: s = t - a/3  ->  t^3 + p t + q.
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    std::array<C, 3> roots;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        const double t0 = u + v;
        roots[0] = C(t0 + shift, 0.0);
        const double re = -t0 / 2.0;
        const double im = std::sqrt(3.0) / 2.0 * (u - v);
        roots[1] = C(re + shift, im);
        roots[2] = C(re + shift, -im);
    } else {
        const double r = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
        const double m = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k) {
            roots[k] =
                C(m * std::cos((phi + 2.0 * std::numbers::pi * k) / 3.0) + shift, 0.0);
        }
    }
    // Newton polish; the closed-form branches lose digits for near-degenerate roots.
    for (auto& z : roots) {
        for (int it = 0; it < 3; ++it) {
            const C f = ((z + a) * z + b) * z + c;
            const C df = (3.0 * z + 2.0 * a) * z + b;
            if (std::abs(df) == 0.0) break;
            z -= f / df;
        }
    }
    return roots;
}

std::array<std::complex<double>, 3> characteristic_roots(const SystemParams& sys) {
    const CubicCoeffs c = closed_loop_cubic(sys);
    if (!(c.omega_eff_sq > 0.0)) {
        throw InstabilityError("characteristic_roots: statically unstable (Omega_eff^2 <= 0)");
    }
    return solve_cubic(c.s1, c.s2, c.a3);
}

}  // namespace springcool
