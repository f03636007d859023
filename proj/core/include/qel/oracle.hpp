#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qel {

using DenseMatrix = std::vector<std::vector<double>>;

struct PerronData {
    double lambda = 0.0;
    std::vector<double> g;  // right eigenvector, sum g_i m_i vol_i = 1
    std::vector<double> m;  // left eigenvector, sum m_i vol_i = 1
    int period = 1;
    std::vector<std::complex<double>> rotated;  // peripheral eigenvalue family
};

// Full dense eigendecomposition; maximal-modulus real nonnegative
// eigentriple. For period > 1 the rotated family is reported alongside.
// size <= 64.
PerronData dense_perron(const DenseMatrix& matrix, const std::vector<double>& vols = {});

// Exact finite-n conditioned Birkhoff average from start state x:
//   E_x[e^{S_n phi} 1_{tau>n} (1/n) sum h(X_i)] / E_x[e^{S_n phi} 1_{tau>n}]
// via P^i(h * P^{n-i} 1)(x), matrix entries already weighted by e^{phi}.
// Rescaled each step (log scale); n <= 1e4, size <= 64.
double exact_conditioned_average(const DenseMatrix& weighted, const std::vector<double>& h, int n,
                                 int start);

// One-step snapshot E_x[h(X_n) e^{S_n phi} | tau^phi > n] (no Cesaro
// average); oscillates for periodic chains where the average converges.
double exact_conditioned_snapshot(const DenseMatrix& weighted, const std::vector<double>& h, int n,
                                  int start);

// Finite Markov symbolic model: states are cylinder cells of a Markov
// partition; psi = phi - log|T'| per state.
struct MarkovModel {
    std::vector<std::string> states;
    std::vector<std::uint64_t> words;                     // bit-packed codes (optional)
    std::vector<std::pair<double, double>> intervals;     // cylinder interval per state
    std::vector<std::vector<std::uint32_t>> succ;         // adjacency lists
    std::vector<double> branch_deriv;                     // |T'| at cylinder midpoint
    std::vector<double> potential;                        // psi per state
    std::string note;
};

struct EquilibriumState {
    std::vector<double> measure;  // per-symbol weights nu = m*gamma (zero off component)
    double pressure = 0.0;        // log lambda
    double entropy = 0.0;         // h_nu
    double integral = 0.0;        // int psi dnu
    std::string note;
};

// Topological pressure and equilibrium state of the model via the dense
// Perron data of L[x][y] = e^{psi(y)} adjacency(y->x), restricted to the
// dominant recurrent component (the SCC with largest leading eigenvalue).
// Entropy from the Doob-transform Markov chain; asserts the variational
// identity |pressure - entropy - integral| <= 1e-9.
EquilibriumState pressure(const MarkovModel& model);

// Full shift / open doubling map on depth-n dyadic cylinders; cylinders
// whose midpoint falls in the hole are removed.
MarkovModel doubling_hole_model(int depth, const std::function<bool(double)>& hole,
                                const std::function<double(double)>& phi);

// Symbolic model of the logistic repeller in the period-3 window:
// depth-n surviving cylinders from the two inverse branches, hole =
// radius-r neighborhoods of the attracting 3-cycle.
MarkovModel logistic_repeller_model(double a, int depth, double hole_radius,
                                    const std::function<double(double)>& phi);

// One-state model of an expanding fixed point with multiplier |T'| = deriv:
// psi = (-t) log deriv, pressure = -t log deriv exactly.
MarkovModel fixed_point_model(double deriv, double t);

nlohmann::json model_to_json(const MarkovModel& m);
nlohmann::json equilibrium_to_json(const EquilibriumState& e);

}  // namespace qel
