#pragma once

#include "springcool/model.hpp"

// Spectral densities of the quantum measurement chain, in hbar = m = 1 units.
//
// Baselines (resonant phase readout, scaled frequency w = 2*Omega/kappa):
//   imprecision  S_xx^imp|_{pi/2,0} = (1+w^2) / (2*Omega_SQL^2)
//   back-action  S_FF^rp|_{0}       = Omega_SQL^2 / (2*(1+w^2))
// with Omega_SQL^2 = omega_sql0^2/(1+delta^2) at fixed input power. The
// detuned/rotated-quadrature corrections are the exact single-sided-cavity
// response factors; their product obeys the uncertainty bound >= 1/4 with
// equality only for resonant phase readout.
//
// Detection loss eta is applied wholly to the imprecision (1/eta) and the
// cross-correlation (1/sqrt(eta)); back-action is unaffected.

namespace springcool {

struct NoisePair {
    double s_xx_imp;  ///< displacement-equivalent imprecision PSD
    double s_ff_rp;   ///< back-action force PSD
    double s_fx_re;   ///< Re of the force-displacement cross PSD (<= 0 for 0 < theta_eff < pi/2)
};

struct PhononBudget {
    double n_ba;      ///< back-action occupation (frequency-independent, structural damping)
    double n_imp;     ///< phonon-equivalent imprecision at the operating angle
    double n_cor;     ///< phonon-equivalent imprecision/back-action correlation
    double n_th_eff;  ///< thermal occupation at the stiffened frequency
    double cq;        ///< quantum cooperativity n_ba / n_th_eff
};

/// Broadband (w -> 0) PSDs at the operating detuning and homodyne angle.
/// Throws ConfigError for a signal-blind readout (theta = arctan delta).
NoisePair broadband_noise(const ReadoutParams& readout);

/// Exact imprecision PSD at physical frequency omega (scaled internally to
/// w = 2*omega/kappa), including the 1/eta loss penalty. Signal-blind
/// configurations (zero displacement transfer at this frequency) throw.
double imprecision_psd_exact(const ReadoutParams& readout, double omega);

/// Exact back-action force PSD at physical frequency omega.
double backaction_psd_exact(const ReadoutParams& readout, double omega);

/// Broadband cross-correlation -cot(theta_eff)/(2 sqrt(eta)).
double cross_correlation_broadband(const ReadoutParams& readout);

/// Exact imprecision-backaction product at physical frequency omega:
/// (1/4eta) * (1+delta^2+w^2) / ((sin t - delta cos t)^2 + w^2 sin^2 t).
double uncertainty_product_exact(const ReadoutParams& readout, double omega);

/// Occupation bookkeeping at the stiffened frequency. n_ba uses the
/// force-PSD-per-quantum convention S_FF^rp / (2 Omega_eff Gamma0[Omega_eff]),
/// which keeps it temperature-independent and matches the thermal-ratio
/// definition to O(1/n_th). n_imp follows from the uncertainty relation
/// n_imp * n_ba = csc^2(theta_eff)/(16 eta).
PhononBudget phonon_budget(const SystemParams& sys);

}  // namespace springcool
