#pragma once

#include <optional>
#include <random>

#include "qel/dynamics.hpp"

namespace qel {

// Additive uniform noise on [-eps, eps]^m, m = state dimension.
// eps = 0 degenerates to the deterministic map.
struct NoiseKernel {
    double epsilon = 0.0;
    int dim = 1;
};

// One-step density of X_{n+1} = T(X_n) + w at y, with circle wraparound.
// Requires epsilon > 0 (the deterministic kernel is singular).
double transition_density(const MapSystem& map, const NoiseKernel& kernel, const State& x,
                          const State& y);

// T(x) + w; nullopt = ABSORBED (landed in the hole or left the space).
std::optional<State> sample_step(const MapSystem& map, const NoiseKernel& kernel, const State& x,
                                 std::mt19937_64& rng);

}  // namespace qel
