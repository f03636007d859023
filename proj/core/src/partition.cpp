#include "qel/partition.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace qel {

State StateSpace::wrap(State x) const {
    if (kind != SpaceKind::Circle) return x;
    double len = extent(0);
    double t = std::fmod(x[0] - lo[0], len);
    if (t < 0) t += len;
    x[0] = lo[0] + t;
    return x;
}

CellPartition::CellPartition(const StateSpace& s, int res) : space(s), resolution(res) {
    if (res < 1) throw std::invalid_argument("CellPartition: resolution < 1");
    n_cells_ = 1;
    cell_vol_ = 1.0;
    for (int a = 0; a < s.dim(); ++a) {
        widths_[a] = s.extent(a) / res;
        n_cells_ *= std::uint32_t(res);
        cell_vol_ *= widths_[a];
    }
}

std::uint32_t CellPartition::cell_of(const State& x) const {
    std::uint32_t idx = 0, stride = 1;
    for (int a = 0; a < space.dim(); ++a) {
        double t = (x[a] - space.lo[a]) / widths_[a];
        if (t < 0.0 || x[a] > space.hi[a]) return std::numeric_limits<std::uint32_t>::max();
        auto i = std::int64_t(t);
        if (i >= resolution) i = resolution - 1;  // right boundary belongs to last cell
        idx += std::uint32_t(i) * stride;
        stride *= std::uint32_t(resolution);
    }
    return idx;
}

State CellPartition::center(std::uint32_t idx) const {
    State c{0.0, 0.0};
    std::uint32_t rem = idx;
    for (int a = 0; a < space.dim(); ++a) {
        std::uint32_t i = rem % std::uint32_t(resolution);
        rem /= std::uint32_t(resolution);
        c[a] = space.lo[a] + (i + 0.5) * widths_[a];
    }
    return c;
}

void CellPartition::bounds(std::uint32_t idx, State& lo, State& hi) const {
    std::uint32_t rem = idx;
    lo = {0.0, 0.0};
    hi = {0.0, 0.0};
    for (int a = 0; a < space.dim(); ++a) {
        std::uint32_t i = rem % std::uint32_t(resolution);
        rem /= std::uint32_t(resolution);
        lo[a] = space.lo[a] + i * widths_[a];
        hi[a] = lo[a] + widths_[a];
    }
}

std::vector<std::uint32_t> CellPartition::neighbors(std::uint32_t idx) const {
    std::vector<std::uint32_t> out;
    std::uint32_t res = std::uint32_t(resolution);
    std::array<std::uint32_t, 2> coord{0, 0};
    std::uint32_t rem = idx;
    int d = space.dim();
    for (int a = 0; a < d; ++a) {
        coord[a] = rem % res;
        rem /= res;
    }
    for (int a = 0; a < d; ++a) {
        std::uint32_t stride = (a == 0) ? 1 : res;
        if (coord[a] > 0)
            out.push_back(idx - stride);
        else if (space.wraps() && a == 0 && res > 1)
            out.push_back(idx + stride * (res - 1));
        if (coord[a] + 1 < res)
            out.push_back(idx + stride);
        else if (space.wraps() && a == 0 && res > 1)
            out.push_back(idx - stride * (res - 1));
    }
    return out;
}

}  // namespace qel
