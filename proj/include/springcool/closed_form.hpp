#pragma once

#include <utility>

#include "springcool/model.hpp"
#include "springcool/spectra.hpp"

// Closed-form steady-state variances and phonon number of the feedback-cooled
// oscillator. Two algebraic routes are kept side by side:
//
//  * The exact route integrates the frozen-mode spectrum analytically via the
//    rational-integral identity for the closed-loop cubic. It uses the actual
//    filter damping Gamma_fb inside the band coefficients and the exact s2,
//    so it reproduces the quadrature oracle to rounding error. This is what
//    CoolingResult reports and what the optimizer maximizes.
//
//  * The band-coefficient route substitutes Gamma_eff for Gamma_fb (valid
//    when feedback dominates the damping) and drops s1 against Omega_L. Its
//    two printed forms - the three-term occupation formula with the C
//    prefactors, and the Lambda-form inverse purity - are algebraically
//    identical, which neff_decomposition exposes for verification and for
//    budget reporting.

namespace springcool {

struct CoolingResult {
    double x_var = 0.0;      ///< <dx^2>
    double p_var = 0.0;      ///< <dp^2>
    double n_eff = 0.0;      ///< phonon occupation from Omega_eff<dx^2>/2 + <dp^2>/(2 Omega_eff) = n+1/2
    double purity = 0.0;     ///< 1/(2 n_eff + 1)
    double omega_eff = 0.0;
    double gamma_eff = 0.0;
    bool stable = false;
};

struct CCoefficients {
    double c_tot;
    double c_imp;
    double c_cor;
    double r;  ///< bandwidth factor 1 - Omega_H/Omega_L
    double g;  ///< damping ratio Gamma0[Omega_eff]/Gamma_eff
};

/// The band-coefficient route, all pieces exposed.
struct NeffDecomposition {
    double thermal_ba_term;   ///< C_tot (n_th_eff + n_ba + 1/2) g / R
    double imprecision_term;  ///< C_imp n_imp / (g R)
    double correlation_term;  ///< -C_cor n_cor / R  (negative when correlations help)
    double mu_inv_three_term; ///< sum of the three terms = 2 n_eff + 1
    double mu_inv_lambda_form;///< Lambda-form inverse purity (same approximation chain)
    double ba_residual;       ///< 1 - C_cor^2/(C_tot C_imp), the uncancelled back-action fraction
};

struct OptimalSpringResult {
    double omega_opt;           ///< omega0 (n_th /(4 n_imp Q0^2))^(1/5)
    double omega_opt_sql_form;  ///< omega0 (eta n_th/Q0)^(1/5) (Omega_SQL/omega0)^(2/5), same number
};

struct GroundStateThresholds {
    double n_imp_max;  ///< sqrt(2)/5^(5/6) n_th^(-2/3) Q0^(-1/3)
    double q0_min;     ///< (5/8)^(5/4) n_th (omega0/Omega_SQL)^3
    double qf_min;     ///< q0_min * omega0/(2 pi): Q*f threshold in internal frequency units
};

/// Exact variances of the frozen-mode spectrum. Throws InstabilityError when
/// the Routh-Hurwitz denominator s1*s2 - Omega_L*Omega_eff^2 is not positive;
/// the message carries the violated inequality.
std::pair<double, double> variances_closed_form(const SystemParams& sys);

/// Exact phonon number / purity with the effective-oscillator bookkeeping.
CoolingResult purity_closed_form(const SystemParams& sys);

CCoefficients c_coefficients(const SystemParams& sys);

NeffDecomposition neff_decomposition(const SystemParams& sys);

/// Homodyne angle maximizing the closed-form purity at fixed detuning,
/// corners and gain. The inverse purity is exactly quadratic in
/// cot(theta_eff), so the stationary angle is explicit; this is the
/// cot(theta) = C_cor n_cor / (2 g C_imp n_imp^(pi/2)) condition evaluated
/// with the exact coefficients. Returns the homodyne angle theta (not
/// theta_eff), in (-pi, pi].
double optimal_angle(const SystemParams& sys);

/// Phase-readout specialization (delta = 0, theta_eff = pi/2, wideband
/// equipartition estimate): n_eff + 1/2 =
///   [n_th_eff + n_ba + 1/2 + (Omega_eff/Gamma0)^2 n_imp] g + n_imp / g.
double phase_readout_neff(const SystemParams& sys);

/// Velocity-damped detailed-balance occupation of the no-spring limit as a
/// function of the feedback-broadened damping rate.
double no_spring_neff(double n_th, double n_ba, double n_imp, double gamma0, double gamma_eff);

/// Gamma_eff-optimized floor of the no-spring limit, 2 sqrt((n_th+n_ba+1/2) n_imp) - 1/2.
double no_spring_optimal_floor(double n_th, double n_ba, double n_imp);

/// Spring frequency balancing thermal dilution (~1/Omega) against
/// feedback back-action (~Omega^4), phase readout, n_imp << 1.
OptimalSpringResult optimal_spring(const OscillatorParams& osc, const ReadoutParams& readout);

/// Objective the optimal spring minimizes: n_th_eff + n_imp Q0^2 (Omega/omega0)^4.
double spring_tradeoff_objective(const OscillatorParams& osc, double n_imp, double omega_eff);

/// Ground-state requirements on imprecision, Q factor and the Q*f product
/// (advisory values, not enforced preconditions).
GroundStateThresholds ground_state_thresholds(const OscillatorParams& osc,
                                              const ReadoutParams& readout);

}  // namespace springcool
