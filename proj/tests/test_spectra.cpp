#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "springcool/random_suite.hpp"
#include "springcool/spectra.hpp"

using namespace springcool;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

SystemParams benchmark() {
    SystemParams sys;
    sys.osc = {1.0, 1e6, 1e8};
    sys.readout = {10.0, 0.0, kPi / 2.0, 1.0, 1e3};
    sys.fb = {5.0, 500.0, 1e3};
    return sys;
}

}  // namespace

TEST_CASE("effective susceptibility") {
    SystemParams sys = benchmark();
    sys.fb.gfb = 0.0;
    sys.readout.omega_sql0 = 0.0;

    SUBCASE("on-resonance bare oscillator is purely dissipative") {
        const std::complex<double> chi = chi_eff_inv(sys, 1.0);
        CHECK(chi.real() == Approx(0.0).scale(1.0).epsilon(1e-15));
        CHECK(chi.imag() == Approx(1e-6).epsilon(1e-12));
    }

    sys = benchmark();

    SUBCASE("below both corners the filter is a spring plus damper") {
        const double w = 1e-3;
        const std::complex<double> fb = chi_fb_inv(sys, w);
        const std::complex<double> expected =
            sys.fb.gfb * std::complex<double>(1.0, w / sys.fb.omega_h);
        CHECK(std::abs(fb - expected) / std::abs(expected) < 2.0 * w / sys.fb.omega_l);
    }

    SUBCASE("above the low-pass corner the filter response plateaus") {
        const double plateau = sys.fb.gfb * sys.fb.omega_l / sys.fb.omega_h;
        CHECK(std::norm(chi_fb_inv(sys, 1e7)) == Approx(plateau * plateau).epsilon(1e-6));
    }
}

TEST_CASE("displacement spectrum") {
    SystemParams sys = benchmark();

    SUBCASE("phase readout has zero correlation term at every frequency") {
        for (double w : {0.1, 5.0, 31.6, 500.0, 1e4}) {
            CHECK(displacement_psd(sys, w).s_correlation == 0.0);
        }
    }

    SUBCASE("total is the sum of the four terms") {
        sys.readout.theta = kPi / 3.0;
        sys.readout.delta = 0.4;
        for (double w : {0.3, 31.6, 2e3}) {
            const SpectrumPoint pt = displacement_psd(sys, w);
            CHECK(pt.s_total == Approx(pt.s_thermal + pt.s_backaction + pt.s_fed_imprecision +
                                       pt.s_correlation)
                                    .epsilon(1e-14));
        }
    }

    SUBCASE("regulated filter: momentum integrand falls off as 1/w^2 far above the corners") {
        const double w1 = 1e6, w2 = 2e6;
        const double m1 = w1 * w1 * displacement_psd(sys, w1).s_fed_imprecision;
        const double m2 = w2 * w2 * displacement_psd(sys, w2).s_fed_imprecision;
        CHECK(m1 / m2 == Approx(4.0).epsilon(0.01));
    }

    SUBCASE("without feedback and detuning only thermal and back-action remain") {
        sys.fb.gfb = 0.0;
        const SpectrumContext ctx = make_spectrum_context(sys);
        for (double w : {0.5, 1.0, 7.3}) {
            const SpectrumPoint pt = displacement_psd(ctx, w);
            CHECK(pt.s_fed_imprecision == 0.0);
            CHECK(pt.s_correlation == 0.0);
            const double chi2 = 1.0 / std::norm(chi_eff_inv(ctx, w));
            CHECK(pt.s_total ==
                  Approx(chi2 * (ctx.s_th_frozen + ctx.noise.s_ff_rp)).epsilon(1e-14));
        }
    }

    SUBCASE("symmetrized spectrum is even") {
        sys.readout.theta = 1.1;
        sys.readout.delta = -0.7;
        for (double w : {0.2, 3.0, 77.0}) {
            CHECK(displacement_psd(sys, w).s_total ==
                  Approx(displacement_psd(sys, -w).s_total).epsilon(1e-14));
            CHECK(displacement_psd(sys, w, ThermalModel::ExactStructural).s_total ==
                  Approx(displacement_psd(sys, -w, ThermalModel::ExactStructural).s_total)
                      .epsilon(1e-14));
        }
    }

    SUBCASE("total stays positive even with a negative correlation term") {
        SplitMix64 rng(31);
        for (int i = 0; i < 40; ++i) {
            const SystemParams s = random_stable_config(31, i);
            const SpectrumContext ctx = make_spectrum_context(s);
            for (int j = 0; j < 25; ++j) {
                const double w = std::pow(10.0, -3.0 + 9.0 * rng.uniform());
                const SpectrumPoint pt = displacement_psd(ctx, w);
                CHECK(pt.s_total >= 0.0);
                CHECK(pt.s_thermal >= 0.0);
                CHECK(pt.s_backaction >= 0.0);
                CHECK(pt.s_fed_imprecision >= 0.0);
            }
        }
    }
}

TEST_CASE("band coefficients") {
    SystemParams sys = benchmark();

    SUBCASE("frozen benchmark values") {
        const LambdaCoefficients lc = lambda_coefficients(sys);
        CHECK(lc.lambda_l == Approx(5.000005632139641e7).epsilon(1e-12));
        CHECK(lc.lambda_h == Approx(5.056321396412410e3).epsilon(1e-12));
        CHECK(lc.s1 == Approx(5.000000000316070e2).epsilon(1e-13));
        CHECK(lc.s2 == Approx(1.000010000158035e5).epsilon(1e-13));
    }

    SUBCASE("phase readout kills the correlation pieces") {
        const SpectrumContext ctx = make_spectrum_context(sys);
        const LambdaCoefficients lc = lambda_coefficients(ctx);
        const double g = ctx.gamma_fb;
        const double imp_only = g * g * (sys.fb.omega_l * sys.fb.omega_l -
                                         sys.fb.omega_h * sys.fb.omega_h) *
                                ctx.noise.s_xx_imp;
        CHECK(lc.lambda_l - lc.lambda_h == Approx(imp_only).epsilon(1e-12));
    }

    SUBCASE("degenerate filter collapses the two coefficients") {
        sys.fb.omega_l = sys.fb.omega_h * (1.0 + 2e-6);
        sys.readout.theta = 1.0;
        const LambdaCoefficients lc = lambda_coefficients(sys);
        CHECK(lc.lambda_l == Approx(lc.lambda_h).epsilon(1e-5));
    }

    SUBCASE("the coefficients reconstruct the spectrum") {
        sys.readout = {10.0, 0.5, kPi / 3.0, 0.8, 1e3};
        const SpectrumContext ctx = make_spectrum_context(sys);
        const LambdaCoefficients lc = lambda_coefficients(ctx);
        SplitMix64 rng(32);
        for (int i = 0; i < 10; ++i) {
            const double w = std::pow(10.0, -2.0 + 6.0 * rng.uniform());
            const double wl2 = sys.fb.omega_l * sys.fb.omega_l;
            const double reconstructed = (lc.lambda_l * w * w + lc.lambda_h * wl2) /
                                         ((w * w + wl2) * std::norm(chi_eff_inv(ctx, w)));
            CHECK(displacement_psd(ctx, w).s_total == Approx(reconstructed).epsilon(1e-10));
        }
    }
}

TEST_CASE("band factorization identity on the random suite") {
    // (w^2 + wl^2) |chi_eff|^-2 S_xx = Lambda_L w^2 + Lambda_H wl^2 for every
    // stable configuration and frequency, frozen variant on both sides.
    SplitMix64 rng(33);
    for (int i = 0; i < 50; ++i) {
        const SystemParams sys = random_stable_config(77, i);
        const SpectrumContext ctx = make_spectrum_context(sys);
        const LambdaCoefficients lc = lambda_coefficients(ctx);
        for (int j = 0; j < 10; ++j) {
            const double w = std::pow(10.0, -3.0 + 9.0 * rng.uniform());
            const double lhs = (w * w + sys.fb.omega_l * sys.fb.omega_l) *
                               std::norm(chi_eff_inv(ctx, w)) *
                               displacement_psd(ctx, w).s_total;
            const double rhs =
                lc.lambda_l * w * w + lc.lambda_h * sys.fb.omega_l * sys.fb.omega_l;
            CHECK(lhs == Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("structural thermal model differs from frozen away from resonance only") {
    const SystemParams sys = benchmark();
    const SpectrumContext ctx = make_spectrum_context(sys);
    const double we = ctx.eff.omega_eff;
    CHECK(displacement_psd(ctx, we, ThermalModel::Frozen).s_thermal ==
          Approx(displacement_psd(ctx, we, ThermalModel::ExactStructural).s_thermal)
              .epsilon(1e-12));
    // Below resonance the structural thermal force exceeds the frozen one.
    CHECK(displacement_psd(ctx, we / 100.0, ThermalModel::ExactStructural).s_thermal >
          displacement_psd(ctx, we / 100.0, ThermalModel::Frozen).s_thermal);
}
