#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "springcool/closed_form.hpp"
#include "springcool/model.hpp"

// Brute-force verification path: the position and momentum variances are
// obtained by adaptive Gauss-Kronrod quadrature of the displacement spectrum,
//   <dx^2> = (1/pi) int_0^inf S_xx  dw,   <dp^2> = (1/pi) int_0^inf w^2 S_xx dw
// (even symmetry folds the full line onto the half line). The integration
// never touches the closed-form algebra: the integrand comes straight from
// spectra::displacement_psd, the domain is split at the filter corners and
// around the resonance, and the tail beyond the outermost corner is handled
// by the quadrature's infinite-interval substitution. Only verify_closed_form
// pulls in closed_form, to difference the two routes.

namespace springcool {

struct QuadratureReport {
    double x_var = 0.0;
    double p_var = 0.0;
    double x_abs_err = 0.0;  ///< accumulated quadrature error estimate
    double p_abs_err = 0.0;
    std::uint64_t n_evals = 0;
    bool converged = false;  ///< both error estimates below tol * value
};

/// Frozen-mode variances by adaptive quadrature. Throws InstabilityError on
/// unstable configurations and ConvergenceError when the error estimate ends
/// far above the requested tolerance (message carries the partial sums).
/// tol must lie in [1e-12, 1e-3].
QuadratureReport integrate_variances(const SystemParams& sys, double tol = 1e-9);

/// Exact-structural thermal noise integrated on [omega_min, inf); the
/// integrand diverges logarithmically at DC, so omega_min must be > 0.
QuadratureReport integrate_variances_structural(const SystemParams& sys, double omega_min,
                                                double tol = 1e-9);

struct ComparisonRecord {
    double rel_x = 0.0;     ///< |closed - quad| / |quad| for <dx^2>
    double rel_p = 0.0;
    double rel_neff = 0.0;
    QuadratureReport quad;
    CoolingResult closed;
};

/// Relative discrepancies between the closed form and the quadrature.
ComparisonRecord verify_closed_form(const SystemParams& sys, double tol = 1e-9);

/// verify_closed_form over a batch of configurations; OpenMP-parallel with
/// results stored by index (bit-identical to the serial reference).
std::vector<ComparisonRecord> verify_batch_serial(std::span<const SystemParams> configs,
                                                  double tol = 1e-9);
std::vector<ComparisonRecord> verify_batch(std::span<const SystemParams> configs,
                                           double tol = 1e-9);

}  // namespace springcool
