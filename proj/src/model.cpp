#include "springcool/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace springcool {

namespace {

[[noreturn]] void fail_config(const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
}

}  // namespace

void OscillatorParams::validate() const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) fail_config("oscillator.omega0", "must be > 0");
    if (!(q0 > 0.0) || !std::isfinite(q0)) fail_config("oscillator.q0", "must be > 0");
    if (!(nth0 >= 0.0) || !std::isfinite(nth0)) fail_config("oscillator.nth0", "must be >= 0");
}

void ReadoutParams::validate() const {
    if (!(omega_sql0 >= 0.0) || !std::isfinite(omega_sql0))
        fail_config("readout.omega_sql0", "must be >= 0");
    if (!std::isfinite(delta)) fail_config("readout.delta", "must be finite");
    if (!(eta > 0.0) || !(eta <= 1.0)) fail_config("readout.eta", "must be in (0, 1]");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) fail_config("readout.kappa", "must be > 0");
    if (!(theta > -std::numbers::pi) || !(theta <= std::numbers::pi))
        fail_config("readout.theta", "must be in (-pi, pi]");
}

void FeedbackParams::validate() const {
    if (!(omega_h > 0.0) || !std::isfinite(omega_h)) fail_config("feedback.omega_h", "must be > 0");
    if (!std::isfinite(omega_l) || !(omega_l > omega_h * (1.0 + 1e-6))) {
        std::ostringstream msg;
        msg << "feedback.omega_l: must exceed feedback.omega_h by ratio > 1+1e-6 "
            << "(omega_h=" << omega_h << ", omega_l=" << omega_l << ")";
        throw ConfigError(msg.str());
    }
    if (!(gfb >= 0.0) || !std::isfinite(gfb)) fail_config("feedback.gfb", "must be >= 0");
}

void SystemParams::validate() const {
    osc.validate();
    readout.validate();
    fb.validate();
}

double gamma_structural(const OscillatorParams& osc, double omega) {
    if (!(omega > 0.0)) {
        std::ostringstream msg;
        msg << "gamma_structural: omega must be > 0 (got " << omega
            << "); structural damping diverges at DC";
        throw ConfigError(msg.str());
    }
    return (osc.omega0 / osc.q0) * (osc.omega0 / omega);
}

double n_thermal(const OscillatorParams& osc, double omega) {
    if (!(omega > 0.0)) {
        std::ostringstream msg;
        msg << "n_thermal: omega must be > 0 (got " << omega << ")";
        throw ConfigError(msg.str());
    }
    return osc.nth0 * (osc.omega0 / omega);
}

double effective_angle(const ReadoutParams& readout) {
    return readout.theta - std::atan(readout.delta);
}

OpticalSpring optical_spring(const ReadoutParams& readout) {
    const double d = readout.delta;
    const double one_d2 = 1.0 + d * d;
    // Fixed input power: the intracavity photon number drops as 1/(1+delta^2),
    // so the operating SQL frequency is omega_sql0/sqrt(1+delta^2).
    const double omega_sql_sq = readout.omega_sql0 * readout.omega_sql0 / one_d2;
    OpticalSpring s;
    s.omega_rp_sq = omega_sql_sq * d / (2.0 * one_d2);
    s.gamma_rp = -(omega_sql_sq / readout.kappa) * d / (one_d2 * one_d2);
    return s;
}

FeedbackSpring feedback_spring(const OscillatorParams& osc, const FeedbackParams& fb) {
    FeedbackSpring s;
    s.omega_fb_sq = fb.gfb * osc.omega0 * osc.omega0;
    s.gamma_fb = s.omega_fb_sq / fb.omega_h;
    return s;
}

EffectiveOscillator effective_oscillator(const SystemParams& sys) {
    const OpticalSpring rp = optical_spring(sys.readout);
    const FeedbackSpring fbs = feedback_spring(sys.osc, sys.fb);
    const double omega_eff_sq =
        sys.osc.omega0 * sys.osc.omega0 + rp.omega_rp_sq + sys.fb.omega_h * fbs.gamma_fb;
    if (!(omega_eff_sq > 0.0)) {
        std::ostringstream msg;
        msg << "statically unstable: omega0^2 + Omega_rp^2 + Omega_H*Gamma_fb = " << omega_eff_sq
            << " <= 0 (anti-spring exceeds restoring force)";
        throw InstabilityError(msg.str());
    }
    EffectiveOscillator eff;
    eff.omega_eff = std::sqrt(omega_eff_sq);
    eff.gamma_eff = gamma_structural(sys.osc, eff.omega_eff) + rp.gamma_rp + fbs.gamma_fb;
    return eff;
}

}  // namespace springcool
