#include "springcool/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "springcool/quantum_noise.hpp"
#include "springcool/stability.hpp"

namespace springcool {

namespace {

struct Chain {
    SpectrumContext ctx;
    LambdaCoefficients lc;
    double a3;
    double denom;  ///< s1*s2 - a3, positive iff stable
};

Chain make_chain(const SystemParams& sys) {
    Chain ch;
    ch.ctx = make_spectrum_context(sys);
    ch.lc = lambda_coefficients(ch.ctx);
    ch.a3 = sys.fb.omega_l * ch.ctx.eff.omega_eff * ch.ctx.eff.omega_eff;
    ch.denom = ch.lc.s1 * ch.lc.s2 - ch.a3;
    if (!(ch.denom > 0.0) || !(ch.lc.s1 > 0.0)) {
        std::ostringstream msg;
        msg << "unstable closed loop: Routh-Hurwitz requires s1 > 0 and s1*s2 > Omega_L*Omega_eff^2"
            << " (s1 = " << ch.lc.s1 << ", s2 = " << ch.lc.s2 << ", a3 = " << ch.a3
            << ", s1*s2 - a3 = " << ch.denom << ")";
        throw InstabilityError(msg.str());
    }
    return ch;
}

std::pair<double, double> variances_from_chain(const Chain& ch) {
    const double omega_eff_sq = ch.ctx.eff.omega_eff * ch.ctx.eff.omega_eff;
    const double omega_l = ch.ctx.sys.fb.omega_l;
    const double x_var = (ch.lc.lambda_l * omega_eff_sq + ch.lc.lambda_h * omega_l * ch.lc.s1) /
                         (2.0 * omega_eff_sq * ch.denom);
    const double p_var =
        (ch.lc.lambda_l * ch.lc.s2 + ch.lc.lambda_h * omega_l * omega_l) / (2.0 * ch.denom);
    return {x_var, p_var};
}

}  // namespace

std::pair<double, double> variances_closed_form(const SystemParams& sys) {
    return variances_from_chain(make_chain(sys));
}

CoolingResult purity_closed_form(const SystemParams& sys) {
    const Chain ch = make_chain(sys);
    const auto [x_var, p_var] = variances_from_chain(ch);
    CoolingResult res;
    res.x_var = x_var;
    res.p_var = p_var;
    res.omega_eff = ch.ctx.eff.omega_eff;
    res.gamma_eff = ch.ctx.eff.gamma_eff;
    const double mu_inv = res.omega_eff * x_var + p_var / res.omega_eff;
    res.n_eff = 0.5 * (mu_inv - 1.0);
    res.purity = 1.0 / mu_inv;
    res.stable = true;
    return res;
}

CCoefficients c_coefficients(const SystemParams& sys) {
    const EffectiveOscillator eff = effective_oscillator(sys);
    const double we2 = eff.omega_eff * eff.omega_eff;
    const double wl = sys.fb.omega_l, wh = sys.fb.omega_h;
    const double k = 2.0 * we2 + (wl - wh) * eff.gamma_eff;
    CCoefficients c;
    c.c_tot = (k + 2.0 * wl * wl) / (wl * wl);
    c.c_imp = (k + 2.0 * wh * wh) / we2;
    c.c_cor = (k + 2.0 * wl * wh) / (wl * eff.omega_eff);
    c.r = 1.0 - wh / wl;
    c.g = gamma_structural(sys.osc, eff.omega_eff) / eff.gamma_eff;
    return c;
}

NeffDecomposition neff_decomposition(const SystemParams& sys) {
    const PhononBudget budget = phonon_budget(sys);
    const CCoefficients c = c_coefficients(sys);
    const EffectiveOscillator eff = effective_oscillator(sys);
    const double theta_eff = effective_angle(sys.readout);
    const double cot_eff = std::cos(theta_eff) / std::sin(theta_eff);
    const double n_imp_phase = 1.0 / (16.0 * sys.readout.eta * budget.n_ba);

    NeffDecomposition d;
    d.thermal_ba_term = c.c_tot * (budget.n_th_eff + budget.n_ba + 0.5) * c.g / c.r;
    d.imprecision_term = c.c_imp * n_imp_phase * (1.0 + cot_eff * cot_eff) / (c.g * c.r);
    d.correlation_term = -c.c_cor * budget.n_cor / c.r;
    d.mu_inv_three_term = d.thermal_ba_term + d.imprecision_term + d.correlation_term;

    // Lambda-form with the feedback-dominated substitution Gamma_fb -> Gamma_eff
    // and s1 -> Omega_L, the same approximation chain as the three-term form.
    const NoisePair noise = broadband_noise(sys.readout);
    const double nth_eff = n_thermal(sys.osc, eff.omega_eff);
    const double gamma0 = gamma_structural(sys.osc, eff.omega_eff);
    const double s_white = 2.0 * (nth_eff + 0.5) * eff.omega_eff * gamma0 + noise.s_ff_rp;
    const double ge = eff.gamma_eff;
    const double wl = sys.fb.omega_l, wh = sys.fb.omega_h;
    const double lam_l = s_white + ge * ge * wl * wl * noise.s_xx_imp + 2.0 * ge * wl * noise.s_fx_re;
    const double lam_h = s_white + ge * ge * wh * wh * noise.s_xx_imp + 2.0 * ge * wh * noise.s_fx_re;
    const double we2 = eff.omega_eff * eff.omega_eff;
    const double s2 = we2 + (wl - wh) * ge;
    d.mu_inv_lambda_form = (lam_l * (we2 + s2) + 2.0 * lam_h * wl * wl) /
                           (2.0 * eff.omega_eff * wl * (s2 - we2));

    d.ba_residual = 1.0 - c.c_cor * c.c_cor / (c.c_tot * c.c_imp);
    return d;
}

double optimal_angle(const SystemParams& sys) {
    // The inverse purity is exactly quadratic in x = cot(theta_eff) because
    // S_imp ~ 1 + x^2 and S_Fx ~ -x enter the band coefficients linearly.
    // Sample at x = 0, +1, -1 to extract the quadratic and take its vertex.
    const double atan_d = std::atan(sys.readout.delta);
    const auto mu_inv_at = [&](double theta_eff) {
        SystemParams s = sys;
        s.readout.theta = theta_eff + atan_d;
        // theta only shifts readout quadratures; wrap into (-pi, pi] for validity.
        while (s.readout.theta > std::numbers::pi) s.readout.theta -= 2.0 * std::numbers::pi;
        while (s.readout.theta <= -std::numbers::pi) s.readout.theta += 2.0 * std::numbers::pi;
        const CoolingResult r = purity_closed_form(s);
        return 2.0 * r.n_eff + 1.0;
    };
    const double pi = std::numbers::pi;
    const double f0 = mu_inv_at(pi / 2.0);        // x = 0
    const double fp = mu_inv_at(pi / 4.0);        // x = +1
    const double fm = mu_inv_at(3.0 * pi / 4.0);  // x = -1
    const double quad = 0.5 * (fp + fm) - f0;
    const double lin = 0.5 * (fp - fm);
    double theta_eff_opt = pi / 2.0;
    if (quad > 0.0) {
        const double x_opt = -lin / (2.0 * quad);
        theta_eff_opt = std::atan2(1.0, x_opt);  // arccot on (0, pi)
    }
    double theta = theta_eff_opt + atan_d;
    while (theta > pi) theta -= 2.0 * pi;
    while (theta <= -pi) theta += 2.0 * pi;
    return theta;
}

double phase_readout_neff(const SystemParams& sys) {
    const PhononBudget b = phonon_budget(sys);
    const EffectiveOscillator eff = effective_oscillator(sys);
    const double gamma0 = gamma_structural(sys.osc, eff.omega_eff);
    const double g = gamma0 / eff.gamma_eff;
    const double spring_ba = std::pow(eff.omega_eff / gamma0, 2) * b.n_imp;
    const double n_plus_half = (b.n_th_eff + b.n_ba + 0.5 + spring_ba) * g + b.n_imp / g;
    return n_plus_half - 0.5;
}

double no_spring_neff(double n_th, double n_ba, double n_imp, double gamma0, double gamma_eff) {
    return (n_th + n_ba + 0.5) * gamma0 / gamma_eff + n_imp * gamma_eff / gamma0 - 0.5;
}

double no_spring_optimal_floor(double n_th, double n_ba, double n_imp) {
    return 2.0 * std::sqrt((n_th + n_ba + 0.5) * n_imp) - 0.5;
}

OptimalSpringResult optimal_spring(const OscillatorParams& osc, const ReadoutParams& readout) {
    const double sql_sq = readout.omega_sql0 * readout.omega_sql0 /
                          (1.0 + readout.delta * readout.delta);
    const double n_imp =
        (1.0 / (4.0 * readout.eta * osc.q0)) * osc.omega0 * osc.omega0 / sql_sq;
    OptimalSpringResult r;
    r.omega_opt = osc.omega0 * std::pow(osc.nth0 / (4.0 * n_imp * osc.q0 * osc.q0), 0.2);
    r.omega_opt_sql_form = osc.omega0 * std::pow(readout.eta * osc.nth0 / osc.q0, 0.2) *
                           std::pow(std::sqrt(sql_sq) / osc.omega0, 0.4);
    return r;
}

double spring_tradeoff_objective(const OscillatorParams& osc, double n_imp, double omega_eff) {
    const double ratio = omega_eff / osc.omega0;
    return n_thermal(osc, omega_eff) + n_imp * osc.q0 * osc.q0 * ratio * ratio * ratio * ratio;
}

GroundStateThresholds ground_state_thresholds(const OscillatorParams& osc,
                                              const ReadoutParams& readout) {
    const double sql = readout.omega_sql0 / std::sqrt(1.0 + readout.delta * readout.delta);
    GroundStateThresholds t;
    t.n_imp_max = std::sqrt(2.0) / std::pow(5.0, 5.0 / 6.0) *
                  std::pow(osc.nth0, -2.0 / 3.0) * std::pow(osc.q0, -1.0 / 3.0);
    t.q0_min = std::pow(5.0 / 8.0, 1.25) * osc.nth0 * std::pow(osc.omega0 / sql, 3);
    t.qf_min = t.q0_min * osc.omega0 / (2.0 * std::numbers::pi);
    return t;
}

}  // namespace springcool
