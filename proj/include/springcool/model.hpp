#pragma once

#include <string>

#include "springcool/errors.hpp"

// Dimensionless description of a structurally damped mechanical oscillator
// stiffened by a detuned intracavity field and a measurement-based feedback
// filter. Internally hbar = m = 1 and frequencies are measured in units of
// the intrinsic resonance (omega0 = 1 unless a caller overrides it); every
// observable then depends only on the dimensionless groups carried by the
// structs below. SI conversion lives in the CLI layer only.

namespace springcool {

struct OscillatorParams {
    double omega0 = 1.0;  ///< intrinsic resonance frequency (unit of the system)
    double q0 = 1e6;      ///< intrinsic quality factor
    double nth0 = 0.0;    ///< thermal occupation at omega0

    void validate() const;
};

struct ReadoutParams {
    double omega_sql0 = 1.0;  ///< zero-detuning SQL frequency, units of omega0
    double delta = 0.0;       ///< detuning normalized to kappa/2
    double theta = 1.5707963267948966;  ///< homodyne angle, radians, in (-pi, pi]
    double eta = 1.0;         ///< detection efficiency, (0, 1]
    double kappa = 1e3;       ///< cavity decay rate, units of omega0

    void validate() const;
};

struct FeedbackParams {
    double omega_h = 1.0;  ///< high-pass corner (feedback active above it)
    double omega_l = 10.0; ///< low-pass corner (feedback rolls off above it)
    double gfb = 0.0;      ///< dimensionless DC gain

    // Degenerate filters are rejected: omega_l/omega_h must exceed 1 + 1e-6,
    // since a zero-bandwidth band-pass has no damping action and the
    // phonon formulas degenerate at R -> 0.
    void validate() const;
};

struct SystemParams {
    OscillatorParams osc;
    ReadoutParams readout;
    FeedbackParams fb;

    void validate() const;
};

struct OpticalSpring {
    double omega_rp_sq;  ///< radiation-pressure spring shift (squared frequency)
    double gamma_rp;     ///< radiation-pressure damping shift (negative for blue detuning)
};

struct FeedbackSpring {
    double omega_fb_sq;  ///< feedback spring shift, equals omega_h * gamma_fb
    double gamma_fb;     ///< feedback damping rate
};

struct EffectiveOscillator {
    double omega_eff;  ///< stiffened resonance frequency
    double gamma_eff;  ///< total damping, structural part frozen at omega_eff
};

/// Structural damping rate Gamma0[omega] = (omega0/q0)*(omega0/omega).
/// Throws ConfigError for omega <= 0 (the rate diverges at DC).
double gamma_structural(const OscillatorParams& osc, double omega);

/// Thermal occupation n_th[omega] = nth0 * omega0/omega. Throws for omega <= 0.
double n_thermal(const OscillatorParams& osc, double omega);

/// Effective quadrature angle theta - arctan(delta): the cavity rotates the
/// reflected field's quadratures by arctan(delta).
double effective_angle(const ReadoutParams& readout);

/// Detuned-readout spring and damping shifts at fixed input power:
/// Omega_SQL^2 = omega_sql0^2/(1+delta^2),
/// Omega_rp^2 = Omega_SQL^2 * delta/(2(1+delta^2)),
/// Gamma_rp   = -(Omega_SQL^2/kappa) * delta/(1+delta^2)^2.
OpticalSpring optical_spring(const ReadoutParams& readout);

/// Feedback spring Omega_fb^2 = gfb*omega0^2 and damping Gamma_fb = gfb*omega0^2/omega_h.
FeedbackSpring feedback_spring(const OscillatorParams& osc, const FeedbackParams& fb);

/// Quadrature-sum effective oscillator: Omega_eff^2 = omega0^2 + Omega_rp^2 + Omega_H*Gamma_fb,
/// Gamma_eff = Gamma0[Omega_eff] + Gamma_rp + Gamma_fb.
/// Throws InstabilityError when Omega_eff^2 <= 0 (anti-spring collapse).
EffectiveOscillator effective_oscillator(const SystemParams& sys);

}  // namespace springcool
