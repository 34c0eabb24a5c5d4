#include "springcool/spectra.hpp"

#include <cmath>

namespace springcool {

SpectrumContext make_spectrum_context(const SystemParams& sys) {
    SpectrumContext ctx;
    ctx.sys = sys;
    ctx.eff = effective_oscillator(sys);
    ctx.gamma0_eff = gamma_structural(sys.osc, ctx.eff.omega_eff);
    ctx.gamma_rp = optical_spring(sys.readout).gamma_rp;
    ctx.gamma_fb = feedback_spring(sys.osc, sys.fb).gamma_fb;
    const double nth_eff = n_thermal(sys.osc, ctx.eff.omega_eff);
    ctx.s_th_frozen = 2.0 * (nth_eff + 0.5) * ctx.eff.omega_eff * ctx.gamma0_eff;
    ctx.noise = broadband_noise(sys.readout);
    return ctx;
}

std::complex<double> chi_fb_inv(const SystemParams& sys, double omega) {
    if (sys.fb.gfb == 0.0) return {0.0, 0.0};
    const std::complex<double> num(1.0, omega / sys.fb.omega_h);
    const std::complex<double> den(1.0, omega / sys.fb.omega_l);
    return sys.osc.omega0 * sys.osc.omega0 * sys.fb.gfb * num / den;
}

std::complex<double> chi_eff_inv(const SpectrumContext& ctx, double omega) {
    const SystemParams& sys = ctx.sys;
    const OpticalSpring rp = optical_spring(sys.readout);
    const double re =
        -omega * omega + sys.osc.omega0 * sys.osc.omega0 + rp.omega_rp_sq;
    const double im = omega * (ctx.gamma0_eff + ctx.gamma_rp);
    return std::complex<double>(re, im) + chi_fb_inv(sys, omega);
}

std::complex<double> chi_eff_inv(const SystemParams& sys, double omega) {
    return chi_eff_inv(make_spectrum_context(sys), omega);
}

SpectrumPoint displacement_psd(const SpectrumContext& ctx, double omega, ThermalModel model) {
    const SystemParams& sys = ctx.sys;
    SpectrumPoint pt;
    pt.omega = omega;
    pt.chi_eff_inv = chi_eff_inv(ctx, omega);
    const double chi2 = 1.0 / std::norm(pt.chi_eff_inv);

    double s_th = ctx.s_th_frozen;
    if (model == ThermalModel::ExactStructural) {
        const double aw = std::abs(omega);
        s_th = 2.0 * (n_thermal(sys.osc, aw) + 0.5) * aw * gamma_structural(sys.osc, aw);
    }

    pt.s_thermal = chi2 * s_th;
    pt.s_backaction = chi2 * ctx.noise.s_ff_rp;
    if (sys.fb.gfb > 0.0) {
        const std::complex<double> fb = chi_fb_inv(sys, omega);
        // chi_fb^-1[-w] = conj(chi_fb^-1[w]) for the real-coefficient filter.
        pt.s_fed_imprecision = chi2 * std::norm(fb) * ctx.noise.s_xx_imp;
        pt.s_correlation = chi2 * 2.0 * fb.real() * ctx.noise.s_fx_re;
    }
    pt.s_total = pt.s_thermal + pt.s_backaction + pt.s_fed_imprecision + pt.s_correlation;
    return pt;
}

SpectrumPoint displacement_psd(const SystemParams& sys, double omega, ThermalModel model) {
    return displacement_psd(make_spectrum_context(sys), omega, model);
}

LambdaCoefficients lambda_coefficients(const SpectrumContext& ctx) {
    const SystemParams& sys = ctx.sys;
    const double s_white = ctx.s_th_frozen + ctx.noise.s_ff_rp;
    const double g = ctx.gamma_fb;
    const double wl = sys.fb.omega_l;
    const double wh = sys.fb.omega_h;

    LambdaCoefficients lc;
    lc.lambda_l = s_white + g * g * wl * wl * ctx.noise.s_xx_imp + 2.0 * g * wl * ctx.noise.s_fx_re;
    lc.lambda_h = s_white + g * g * wh * wh * ctx.noise.s_xx_imp + 2.0 * g * wh * ctx.noise.s_fx_re;
    lc.s1 = wl + ctx.gamma0_eff + ctx.gamma_rp;
    lc.s2 = ctx.eff.omega_eff * ctx.eff.omega_eff + wl * ctx.eff.gamma_eff - wh * ctx.gamma_fb;
    return lc;
}

LambdaCoefficients lambda_coefficients(const SystemParams& sys) {
    return lambda_coefficients(make_spectrum_context(sys));
}

std::vector<SpectrumPoint> spectrum_grid_serial(const SystemParams& sys,
                                                std::span<const double> omegas,
                                                ThermalModel model) {
    const SpectrumContext ctx = make_spectrum_context(sys);
    std::vector<SpectrumPoint> out(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) out[i] = displacement_psd(ctx, omegas[i], model);
    return out;
}

std::vector<SpectrumPoint> spectrum_grid(const SystemParams& sys, std::span<const double> omegas,
                                         ThermalModel model) {
    const SpectrumContext ctx = make_spectrum_context(sys);
    std::vector<SpectrumPoint> out(omegas.size());
    const std::int64_t n = static_cast<std::int64_t>(omegas.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            displacement_psd(ctx, omegas[static_cast<std::size_t>(i)], model);
    }
    return out;
}

}  // namespace springcool
