#pragma once

#include <cstdint>
#include <vector>

#include "springcool/model.hpp"

// Deterministic generator of randomized stable configurations for the
// verification suite. Draws are platform-independent (splitmix64 scaled to
// [0,1), no std::random distributions) so identical seeds give identical
// suites everywhere.
//
// Distribution: Q0 log-uniform [1e3, 1e9], nth0 log-uniform [1, 1e10],
// omega_sql0 log-uniform [0.1, 100], delta uniform [-2, 2], theta uniform in
// (0, pi), eta uniform [0.1, 1], Omega_H log-uniform [1e-2, 1e2]*omega_sql0,
// Omega_L/Omega_H log-uniform [1e0.3, 1e3], Gamma_fb log-uniform over four
// decades below Omega_L/3. Unstable draws are rejected and redrawn.

namespace springcool {

/// Deterministic 64-bit mixer; uniform() returns a double in [0, 1).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// The index-th stable configuration of the suite identified by seed.
SystemParams random_stable_config(std::uint64_t seed, int index);

std::vector<SystemParams> random_stable_suite(std::uint64_t seed, int count);

}  // namespace springcool
