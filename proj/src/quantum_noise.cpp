#include "springcool/quantum_noise.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace springcool {

namespace {

// (sin t - d cos t)^2 == (1+d^2) sin^2(t - arctan d); kept in the raw form so
// blindness shows up as an exact zero of the denominator.
double quadrature_projection_sq(double theta, double delta) {
    const double p = std::sin(theta) - delta * std::cos(theta);
    return p * p;
}

[[noreturn]] void fail_blind(const ReadoutParams& readout, double omega) {
    std::ostringstream msg;
    msg << "signal-blind readout: theta = " << readout.theta << ", delta = " << readout.delta
        << " (theta_eff = " << effective_angle(readout) << ") carries no displacement signal";
    if (omega > 0.0) msg << " at omega = " << omega;
    throw ConfigError(msg.str());
}

double operating_sql_sq(const ReadoutParams& readout) {
    return readout.omega_sql0 * readout.omega_sql0 / (1.0 + readout.delta * readout.delta);
}

}  // namespace

NoisePair broadband_noise(const ReadoutParams& readout) {
    const double d = readout.delta;
    const double one_d2 = 1.0 + d * d;
    const double proj = quadrature_projection_sq(readout.theta, d);
    if (proj == 0.0) fail_blind(readout, 0.0);
    const double sql_sq = operating_sql_sq(readout);

    NoisePair n;
    n.s_ff_rp = sql_sq / (2.0 * one_d2);
    n.s_xx_imp = one_d2 * one_d2 / (2.0 * sql_sq * readout.eta * proj);
    // cot(theta - arctan d) = (cos t + d sin t) / (sin t - d cos t)
    const double cot_eff = (std::cos(readout.theta) + d * std::sin(readout.theta)) /
                           (std::sin(readout.theta) - d * std::cos(readout.theta));
    n.s_fx_re = -0.5 * cot_eff / std::sqrt(readout.eta);
    return n;
}

double imprecision_psd_exact(const ReadoutParams& readout, double omega) {
    const double d = readout.delta;
    const double w = 2.0 * omega / readout.kappa;
    const double st = std::sin(readout.theta);
    const double denom = quadrature_projection_sq(readout.theta, d) + w * w * st * st;
    if (denom == 0.0) fail_blind(readout, omega);
    const double wp = d + w, wm = d - w;
    const double cavity = (1.0 + wp * wp) * (1.0 + wm * wm);
    const double sql_sq = operating_sql_sq(readout);
    return cavity / (2.0 * sql_sq * readout.eta * denom);
}

double backaction_psd_exact(const ReadoutParams& readout, double omega) {
    const double d = readout.delta;
    const double w = 2.0 * omega / readout.kappa;
    const double wp = d + w, wm = d - w;
    const double cavity = (1.0 + wp * wp) * (1.0 + wm * wm);
    const double sql_sq = operating_sql_sq(readout);
    return sql_sq * (1.0 + d * d + w * w) / (2.0 * cavity);
}

double cross_correlation_broadband(const ReadoutParams& readout) {
    const double d = readout.delta;
    const double p = std::sin(readout.theta) - d * std::cos(readout.theta);
    if (p == 0.0) fail_blind(readout, 0.0);
    const double cot_eff = (std::cos(readout.theta) + d * std::sin(readout.theta)) / p;
    return -0.5 * cot_eff / std::sqrt(readout.eta);
}

double uncertainty_product_exact(const ReadoutParams& readout, double omega) {
    const double d = readout.delta;
    const double w = 2.0 * omega / readout.kappa;
    const double st = std::sin(readout.theta);
    const double denom = quadrature_projection_sq(readout.theta, d) + w * w * st * st;
    if (denom == 0.0) fail_blind(readout, omega);
    return (1.0 + d * d + w * w) / (4.0 * readout.eta * denom);
}

PhononBudget phonon_budget(const SystemParams& sys) {
    const EffectiveOscillator eff = effective_oscillator(sys);
    const NoisePair noise = broadband_noise(sys.readout);
    const double gamma0_eff = gamma_structural(sys.osc, eff.omega_eff);

    PhononBudget b;
    b.n_th_eff = n_thermal(sys.osc, eff.omega_eff);
    b.n_ba = noise.s_ff_rp / (2.0 * eff.omega_eff * gamma0_eff);
    // n_imp = S_xx^imp * Omega_eff * Gamma0[Omega_eff] / 2; equivalent to the
    // uncertainty-relation form csc^2(theta_eff) / (16 eta n_ba).
    b.n_imp = noise.s_xx_imp * eff.omega_eff * gamma0_eff / 2.0;
    b.n_cor = -noise.s_fx_re;  // positive for 0 < theta_eff < pi/2
    b.cq = b.n_th_eff > 0.0 ? b.n_ba / b.n_th_eff : std::numeric_limits<double>::infinity();
    return b;
}

}  // namespace springcool
