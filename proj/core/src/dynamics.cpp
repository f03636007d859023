#include "qel/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qel/util.hpp"

namespace qel {
namespace {

double get_param(const std::map<std::string, double>& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw std::invalid_argument("build_map: missing param " + key);
    return it->second;
}

double get_param_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

// Boole circle map branch on [0,1/2); the other branch is 1 - T(1-x).
double boole_branch(double x) { return x * (1.0 - x) / (1.0 - x - x * x); }

double boole_branch_deriv(double x) {
    double num = x - x * x, den = 1.0 - x - x * x;
    double dnum = 1.0 - 2.0 * x, dden = -1.0 - 2.0 * x;
    return (dnum * den - num * dden) / (den * den);
}

}  // namespace

MapSystem build_map(const std::string& id, const std::map<std::string, double>& params) {
    MapSystem m;
    m.id = id;
    m.params = params;
    if (id == "doubling") {
        m.space.kind = SpaceKind::Circle;
        m.eval = [](const State& x) -> State {
            double y = 2.0 * x[0];
            if (y >= 1.0) y -= 1.0;
            return {y, 0.0};
        };
        m.deriv = [](const State&) { return 2.0; };
    } else if (id == "logistic") {
        double a = get_param(params, "a");
        if (a <= 0.0 || a > 4.0) throw std::invalid_argument("logistic: a out of (0,4]");
        m.space.kind = SpaceKind::Interval;
        m.eval = [a](const State& x) -> State { return {a * x[0] * (1.0 - x[0]), 0.0}; };
        m.deriv = [a](const State& x) { return std::fabs(a * (1.0 - 2.0 * x[0])); };
    } else if (id == "boole") {
        double s = get_param(params, "s");
        if (s <= 0.0 || s >= 0.125) throw std::invalid_argument("boole: s out of (0,1/8)");
        m.space.kind = SpaceKind::Circle;
        m.eval = [](const State& x) -> State {
            double t = x[0];
            double y = (t < 0.5) ? boole_branch(t) : 1.0 - boole_branch(1.0 - t);
            if (y < 0.0) y += 1.0;
            if (y >= 1.0) y -= 1.0;
            return {y, 0.0};
        };
        m.deriv = [](const State& x) {
            double t = x[0] < 0.5 ? x[0] : 1.0 - x[0];
            return std::fabs(boole_branch_deriv(t));
        };
        m.hole = [s](const State& x) { return x[0] < s || x[0] > 1.0 - s; };
    } else if (id == "quadratic") {
        double cr = get_param(params, "cr");
        double ci = get_param(params, "ci");
        double R = get_param_or(params, "box_radius", 2.0);
        m.space.kind = SpaceKind::Rectangle;
        m.space.lo = {-R, -R};
        m.space.hi = {R, R};
        m.eval = [cr, ci](const State& z) -> State {
            return {z[0] * z[0] - z[1] * z[1] + cr, 2.0 * z[0] * z[1] + ci};
        };
        m.deriv = [](const State& z) { return 4.0 * (z[0] * z[0] + z[1] * z[1]); };
    } else {
        throw std::invalid_argument("build_map: unknown id " + id);
    }
    return m;
}

std::function<bool(const State&)> interval_hole(double lo, double hi) {
    return [lo, hi](const State& x) { return x[0] >= lo && x[0] < hi; };
}

std::function<bool(const State&)> union_interval_hole(
    const std::vector<std::pair<double, double>>& ivs) {
    return [ivs](const State& x) {
        for (const auto& [lo, hi] : ivs)
            if (x[0] >= lo && x[0] < hi) return true;
        return false;
    };
}

std::function<bool(const State&)> ball_hole(const std::vector<State>& centers, double radius,
                                            int dim) {
    return [centers, radius, dim](const State& x) {
        for (const auto& c : centers) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
            if (d2 < radius * radius) return true;
        }
        return false;
    };
}

MapSystem with_hole(MapSystem m, std::function<bool(const State&)> hole) {
    m.hole = std::move(hole);
    return m;
}

WeightFunction weight_constant(double c) {
    WeightFunction w;
    w.eval = [c](const State&) { return c; };
    w.holder_note = "constant " + fmt_double(c);
    return w;
}

WeightFunction weight_tlog(const MapSystem& map, double t) {
    WeightFunction w;
    auto deriv = map.deriv;
    w.eval = [deriv, t](const State& x) { return (-t + 1.0) * std::log(deriv(x)); };
    w.holder_note = "(-t+1)log|T'|, t=" + fmt_double(t);
    return w;
}

std::vector<double> attracting_cycle(const MapSystem& map, double x0, int period, int burn_in) {
    State x{x0, 0.0};
    for (int i = 0; i < burn_in; ++i) x = map.space.wrap(map.eval(x));
    std::vector<double> pts(period);
    for (int i = 0; i < period; ++i) {
        pts[i] = x[0];
        x = map.space.wrap(map.eval(x));
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

std::vector<std::uint32_t> survivor_cells(const MapSystem& map, const CellPartition& partition,
                                          int depth, int samples_per_axis) {
    if (depth < 0) throw std::invalid_argument("survivor_cells: depth < 0");
    const int d = map.space.dim();
    auto nodes = sample_nodes01(samples_per_axis);
    const size_t per_cell = d == 1 ? nodes.size() : nodes.size() * nodes.size();
    std::vector<std::uint32_t> out;
    State lo, hi;
    for (std::uint32_t c = 0; c < partition.size(); ++c) {
        partition.bounds(c, lo, hi);
        bool alive_cell = false;
        for (size_t s = 0; s < per_cell && !alive_cell; ++s) {
            State x{0.0, 0.0};
            x[0] = lo[0] + nodes[s % nodes.size()] * (hi[0] - lo[0]);
            if (d == 2) x[1] = lo[1] + nodes[s / nodes.size()] * (hi[1] - lo[1]);
            bool alive = !map.in_hole(x);
            for (int n = 0; n < depth && alive; ++n) {
                x = map.space.wrap(map.eval(x));
                if (!map.space.contains(x) || map.in_hole(x)) alive = false;
            }
            alive_cell = alive;
        }
        if (alive_cell) out.push_back(c);
    }
    return out;
}

}  // namespace qel
