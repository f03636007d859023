#include "qel/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qel {
namespace {

// integral of |linear interpolant| over a segment of width w with endpoint
// values d0, d1
double abs_linear_integral(double d0, double d1, double w) {
    if ((d0 >= 0.0) == (d1 >= 0.0)) return 0.5 * w * (std::fabs(d0) + std::fabs(d1));
    double denom = std::fabs(d1 - d0);
    return 0.5 * w * (d0 * d0 + d1 * d1) / denom;
}

double w1_1d(const CellPartition& part, const std::vector<double>& a,
             const std::vector<double>& b) {
    const int n = part.resolution;
    const double w = part.width(0);
    double diff = 0.0, total = 0.0;
    for (int i = 0; i < n; ++i) {
        double d0 = diff;
        diff += a[i] - b[i];
        total += abs_linear_integral(d0, diff, w);
    }
    return total;
}

double w1_sliced(const CellPartition& part, const std::vector<double>& a,
                 const std::vector<double>& b, int n_dirs = 64) {
    const std::uint32_t n = part.size();
    std::vector<double> proj(n);
    std::vector<std::uint32_t> order(n);
    double acc = 0.0;
    for (int d = 0; d < n_dirs; ++d) {
        double th = M_PI * d / n_dirs;
        double cx = std::cos(th), cy = std::sin(th);
        for (std::uint32_t i = 0; i < n; ++i) {
            auto c = part.center(i);
            proj[i] = cx * c[0] + cy * c[1];
        }
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::uint32_t i, std::uint32_t j) { return proj[i] < proj[j]; });
        double cum = 0.0, w1 = 0.0;
        for (std::uint32_t k = 0; k + 1 < n; ++k) {
            cum += a[order[k]] - b[order[k]];
            w1 += std::fabs(cum) * (proj[order[k + 1]] - proj[order[k]]);
        }
        acc += w1;
    }
    return acc / n_dirs;
}

}  // namespace

double w1_distance(const CellPartition& partition, const std::vector<double>& a,
                   const std::vector<double>& b) {
    if (a.size() != partition.size() || b.size() != partition.size())
        throw std::invalid_argument("w1_distance: weight vectors must cover the partition");
    if (partition.space.dim() == 1) return w1_1d(partition, a, b);
    return w1_sliced(partition, a, b);
}

}  // namespace qel
