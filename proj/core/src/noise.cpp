#include "qel/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace qel {

double transition_density(const MapSystem& map, const NoiseKernel& kernel, const State& x,
                          const State& y) {
    if (kernel.epsilon <= 0.0)
        throw std::invalid_argument("transition_density: epsilon = 0 is singular");
    const double eps = kernel.epsilon;
    State tx = map.eval(x);
    double dens = 1.0;
    for (int a = 0; a < map.space.dim(); ++a) {
        double d = y[a] - tx[a];
        if (a == 0 && map.space.wraps()) {
            double len = map.space.extent(0);
            d = std::remainder(d, len);  // nearest representative on the circle
        }
        if (std::fabs(d) > eps) return 0.0;
        dens /= 2.0 * eps;
    }
    return dens;
}

std::optional<State> sample_step(const MapSystem& map, const NoiseKernel& kernel, const State& x,
                                 std::mt19937_64& rng) {
    State y = map.eval(x);
    if (kernel.epsilon > 0.0) {
        std::uniform_real_distribution<double> u(-kernel.epsilon, kernel.epsilon);
        for (int a = 0; a < map.space.dim(); ++a) y[a] += u(rng);
    }
    y = map.space.wrap(y);
    if (!map.space.contains(y) || map.in_hole(y)) return std::nullopt;
    return y;
}

}  // namespace qel
