#include "springcool/random_suite.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "springcool/stability.hpp"

namespace springcool {

namespace {

double log_uniform(SplitMix64& rng, double lo, double hi) {
    return lo * std::pow(hi / lo, rng.uniform());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    SplitMix64 h(seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xD1B54A32D192ED03ULL));
    return h.next();
}

}  // namespace

SystemParams random_stable_config(std::uint64_t seed, int index) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(index),
                                static_cast<std::uint64_t>(attempt)));
        SystemParams sys;
        sys.osc.omega0 = 1.0;
        sys.osc.q0 = log_uniform(rng, 1e3, 1e9);
        sys.osc.nth0 = log_uniform(rng, 1.0, 1e10);
        sys.readout.omega_sql0 = log_uniform(rng, 0.1, 100.0);
        sys.readout.delta = -2.0 + 4.0 * rng.uniform();
        sys.readout.theta = (0.001 + 0.998 * rng.uniform()) * std::numbers::pi;
        sys.readout.eta = 0.1 + 0.9 * rng.uniform();
        sys.readout.kappa = 1e3;
        sys.fb.omega_h = sys.readout.omega_sql0 * log_uniform(rng, 1e-2, 1e2);
        sys.fb.omega_l = sys.fb.omega_h * log_uniform(rng, std::pow(10.0, 0.3), 1e3);
        const double gamma_fb = (sys.fb.omega_l / 3.0) * log_uniform(rng, 1e-4, 1.0);
        sys.fb.gfb = gamma_fb * sys.fb.omega_h / (sys.osc.omega0 * sys.osc.omega0);
        try {
            sys.validate();
            if (check_stability(sys).stable) return sys;
        } catch (const Error&) {
            // statically unstable or signal-blind draw; redraw
        }
    }
    std::ostringstream msg;
    msg << "random_stable_config: no stable draw after 1000 attempts (seed " << seed << ", index "
        << index << ")";
    throw ConvergenceError(msg.str());
}

std::vector<SystemParams> random_stable_suite(std::uint64_t seed, int count) {
    std::vector<SystemParams> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(random_stable_config(seed, i));
    return out;
}

}  // namespace springcool
