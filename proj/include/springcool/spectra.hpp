#pragma once

#include <complex>
#include <span>
#include <vector>

#include "springcool/model.hpp"
#include "springcool/quantum_noise.hpp"

// Closed-loop displacement spectrum
//   S_xx[w] = |chi_eff[w]|^2 ( S_FF^th + S_FF^rp + |chi_fb^-1|^2 S_xx^imp
//                              + 2 Re(chi_fb^-1[-w] S_Fx) )
// with chi_eff^-1 = chi_0^-1 + chi_rp^-1 + chi_fb^-1 and the band-limited
// feedback filter chi_fb^-1 = omega0^2 gfb (1 + i w/Omega_H)/(1 + i w/Omega_L).
//
// Two thermal-damping variants are kept:
//   Frozen          - Gamma0 evaluated at Omega_eff inside the thermal PSD.
//                     This is the object the closed form and the quadrature
//                     oracle both integrate, so their comparison is exact.
//   ExactStructural - Gamma0[w] ~ 1/w inside the thermal PSD, for spectrum
//                     display and for the low-frequency divergence study.
// The susceptibility always uses the frozen Gamma0[Omega_eff].

namespace springcool {

enum class ThermalModel { Frozen, ExactStructural };

struct SpectrumPoint {
    double omega = 0.0;
    std::complex<double> chi_eff_inv;
    double s_total = 0.0;
    double s_thermal = 0.0;
    double s_backaction = 0.0;
    double s_fed_imprecision = 0.0;
    double s_correlation = 0.0;  ///< may be negative; the total never is
};

/// Coefficients of the exact band-factorized spectrum,
///   (w^2 + Omega_L^2) |chi_eff|^-2 S_xx[w] = Lambda_L w^2 + Lambda_H Omega_L^2,
/// together with the closed-loop cubic s^3 + s1 s^2 + s2 s + Omega_L Omega_eff^2.
/// The factorization uses the actual filter damping Gamma_fb, which makes the
/// identity exact rather than tied to the feedback-dominated limit.
struct LambdaCoefficients {
    double lambda_l;
    double lambda_h;
    double s1;  ///< Omega_L + Gamma0[Omega_eff] + Gamma_rp
    double s2;  ///< Omega_eff^2 + Omega_L*Gamma_eff - Omega_H*Gamma_fb
};

/// Everything displacement_psd needs, precomputed once per parameter set.
struct SpectrumContext {
    SystemParams sys;
    EffectiveOscillator eff;
    double gamma0_eff;   ///< Gamma0 frozen at Omega_eff
    double gamma_rp;
    double gamma_fb;
    double s_th_frozen;  ///< 2 (n_th_eff + 1/2) Omega_eff Gamma0[Omega_eff]
    NoisePair noise;     ///< broadband S_xx^imp, S_FF^rp, S_Fx
};

SpectrumContext make_spectrum_context(const SystemParams& sys);

/// Feedback filter response omega0^2 gfb (1 + i w/Omega_H)/(1 + i w/Omega_L).
std::complex<double> chi_fb_inv(const SystemParams& sys, double omega);

/// Inverse effective susceptibility (m = 1), Gamma0 frozen at Omega_eff.
std::complex<double> chi_eff_inv(const SystemParams& sys, double omega);
std::complex<double> chi_eff_inv(const SpectrumContext& ctx, double omega);

SpectrumPoint displacement_psd(const SystemParams& sys, double omega,
                               ThermalModel model = ThermalModel::Frozen);
SpectrumPoint displacement_psd(const SpectrumContext& ctx, double omega,
                               ThermalModel model = ThermalModel::Frozen);

LambdaCoefficients lambda_coefficients(const SystemParams& sys);
LambdaCoefficients lambda_coefficients(const SpectrumContext& ctx);

/// Evaluate the spectrum over a frequency grid. The parallel kernel assigns
/// one grid point per iteration and writes by index, so serial and parallel
/// results are bit-identical; the serial variant is kept as the reference.
std::vector<SpectrumPoint> spectrum_grid_serial(const SystemParams& sys,
                                                std::span<const double> omegas,
                                                ThermalModel model = ThermalModel::Frozen);
std::vector<SpectrumPoint> spectrum_grid(const SystemParams& sys, std::span<const double> omegas,
                                         ThermalModel model = ThermalModel::Frozen);

}  // namespace springcool
