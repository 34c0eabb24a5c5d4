#pragma once

#include <array>
#include <complex>

#include "springcool/model.hpp"
#include "springcool/spectra.hpp"

// Routh-Hurwitz analysis of the closed-loop cubic
//   s^3 + s1 s^2 + s2 s + Omega_L Omega_eff^2,
// the characteristic polynomial of chi_eff^-1 once the filter pole is pulled
// in. For a cubic with positive leading coefficient, stability is equivalent
// to s1 > 0, a3 > 0 and s1*s2 > a3.

namespace springcool {

struct StabilityReport {
    bool stable = false;
    double gfb_min = 0.0;        ///< minimum stabilizing gain under the full criterion
    double gfb_min_paper = 0.0;  ///< one-line bound -Gamma_rp Omega_L Omega_H / (omega0^2 (Omega_L - Omega_H))
    double slack_s1 = 0.0;
    double slack_s2 = 0.0;
    double slack_a3 = 0.0;
    double slack_rh = 0.0;  ///< s1*s2 - a3
};

/// Full Routh-Hurwitz verdict. Never throws: statically unstable parameter
/// sets (Omega_eff^2 <= 0) report stable = false through the a3 slack.
StabilityReport check_stability(const SystemParams& sys);

/// Roots of the closed-loop cubic in the Laplace variable; all real parts
/// negative iff stable. Requires Omega_eff^2 > 0.
std::array<std::complex<double>, 3> characteristic_roots(const SystemParams& sys);

/// Roots of s^3 + a s^2 + b s + c (monic, real coefficients).
std::array<std::complex<double>, 3> solve_cubic(double a, double b, double c);

}  // namespace springcool
