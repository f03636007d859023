#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qel/partition.hpp"

namespace qel {

struct MapSystem {
    std::string id;
    StateSpace space;
    std::function<State(const State&)> eval;   // the map T
    std::function<double(const State&)> deriv; // |det dT|
    std::function<bool(const State&)> hole;    // open hole U (true = inside U)
    std::map<std::string, double> params;

    bool in_hole(const State& x) const { return hole && hole(x); }
};

struct WeightFunction {
    std::function<double(const State&)> eval;  // phi, log-scale weight
    std::string holder_note;

    double operator()(const State& x) const { return eval ? eval(x) : 0.0; }
};

// Supported families: "doubling" (2x mod 1 on the circle), "logistic"
// (ax(1-x) on [0,1], param a), "boole" (circle map with built-in hole
// U_s = [0,s) u (1-s,1], param s), "quadratic" (z^2+c on a rectangle,
// params cr, ci, box_radius).
MapSystem build_map(const std::string& id, const std::map<std::string, double>& params);

// Hole constructors. Predicates are open sets; interval holes are
// half-open [lo,hi) matching cylinder conventions.
std::function<bool(const State&)> interval_hole(double lo, double hi);
std::function<bool(const State&)> union_interval_hole(const std::vector<std::pair<double, double>>& ivs);
std::function<bool(const State&)> ball_hole(const std::vector<State>& centers, double radius, int dim);

MapSystem with_hole(MapSystem m, std::function<bool(const State&)> hole);

// phi_t(x) = (-t+1) log|T'(x)|  (so psi = phi - log|T'| = -t log|T'|).
WeightFunction weight_constant(double c);
WeightFunction weight_tlog(const MapSystem& map, double t);

// Attracting periodic orbit found by iterating from x0 (transient burned
// in); returns the cycle points sorted ascending. 1-D maps only.
std::vector<double> attracting_cycle(const MapSystem& map, double x0, int period, int burn_in = 4000);

// Cells C such that some sample point of C has its first `depth` images
// outside the hole (and inside the space). Sorted ascending.
// samples_per_axis points per axis, endpoints included, tensorized.
std::vector<std::uint32_t> survivor_cells(const MapSystem& map, const CellPartition& partition,
                                          int depth, int samples_per_axis = 9);

}  // namespace qel
