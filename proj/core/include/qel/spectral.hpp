#pragma once

#include <cstdint>
#include <vector>

#include "qel/sparse.hpp"
#include "qel/ulam.hpp"

namespace qel {

struct PowerResult {
    double lambda = 0.0;
    std::vector<double> vec;  // nonnegative, unit sup-norm
    double residual = 0.0;
    int iters = 0;
    bool converged = false;
};

// Deterministic power iteration from the all-ones start (or `start`).
// steps > 1 iterates A^steps per step and reports lambda = (lambda_k)^(1/steps)
// with the residual measured on A^steps (period-aware extraction).
PowerResult power_leading(const SparseMatrix& A, double tol = 1e-12, int max_iter = 20000,
                          int steps = 1, const std::vector<double>* start = nullptr);

struct PeriodInfo {
    int k = 1;                                   // period of the dominant SCC
    int dominant_scc = -1;
    std::vector<int> class_of;                   // cyclic class per index, -1 outside
    std::vector<std::vector<std::uint32_t>> sccs;
    std::vector<double> scc_lambda;
    std::vector<int> scc_period;
    bool near_degenerate = false;                // two SCC lambdas within rel 1e-6
};

// Period from the Boolean support digraph: SCCs, per-SCC gcd of cycle
// lengths via BFS levels, dominant SCC by restricted leading eigenvalue.
// Cyclic classes are labeled so one-step mass moves C_i -> C_{i+1 mod k};
// equivalently P applied to an indicator of C_i is supported on C_{i-1 mod k}.
PeriodInfo detect_period(const SparseMatrix& A, double support_tol_rel = 1e-12);

struct SpectralTriple {
    double lambda = 0.0;
    std::vector<double> g;          // P g = lambda g, sum g_i m_i vol_i = 1
    std::vector<double> m;          // L m = lambda m, sum m_i vol_i = 1
    int period = 1;
    std::vector<int> cyclic_class;  // -1 outside the dominant SCC
    double residual = 0.0;
    bool near_degenerate = false;
};

struct SolveOptions {
    double tol = 1e-13;
    int max_iter = 100000;
    const std::vector<double>* g_start = nullptr;
    const std::vector<double>* m_start = nullptr;
};

// Extracts (lambda, g, m) with the joint normalization; lambda is taken
// from the Koopman side and cross-checked against the dual (abort on
// disagreement beyond 1e-8 relative).
SpectralTriple solve_triple(const UlamOperator& op, const SolveOptions& opts = {});

struct QuasiErgodicMeasure {
    std::vector<double> weights;          // nu_i = g_i m_i vol_i / sum
    std::vector<std::uint32_t> support;   // local indices with weight > threshold
};

QuasiErgodicMeasure quasi_ergodic(const SpectralTriple& triple, const UlamOperator& op);

}  // namespace qel
