#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace qel {

// States live in R^1 or R^2; 1-D systems use component 0 only.
using State = std::array<double, 2>;

enum class SpaceKind { Interval, Circle, Rectangle };

struct StateSpace {
    SpaceKind kind = SpaceKind::Interval;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};

    int dim() const { return kind == SpaceKind::Rectangle ? 2 : 1; }
    double extent(int axis) const { return hi[axis] - lo[axis]; }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim(); ++a) v *= extent(a);
        return v;
    }
    bool wraps() const { return kind == SpaceKind::Circle; }
    bool contains(const State& x) const {
        for (int a = 0; a < dim(); ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }
    // Fold into the fundamental domain (circle only; others unchanged).
    State wrap(State x) const;
};

// Uniform grid of axis-aligned cells, `resolution` per axis.
// Cell index = ix + resolution*iy (row-major over axis 1).
struct CellPartition {
    StateSpace space;
    int resolution = 0;

    CellPartition() = default;
    CellPartition(const StateSpace& s, int res);

    std::uint32_t size() const { return n_cells_; }
    double cell_volume() const { return cell_vol_; }
    double width(int axis) const { return widths_[axis]; }

    // Index of the cell containing x; UINT32_MAX if x is outside the space.
    std::uint32_t cell_of(const State& x) const;
    State center(std::uint32_t idx) const;
    void bounds(std::uint32_t idx, State& lo, State& hi) const;
    // Face-adjacent neighbors (wrapping on the circle).
    std::vector<std::uint32_t> neighbors(std::uint32_t idx) const;

  private:
    std::uint32_t n_cells_ = 0;
    double cell_vol_ = 0.0;
    std::array<double, 2> widths_{0.0, 0.0};
};

}  // namespace qel
