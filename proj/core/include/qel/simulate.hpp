#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qel/dynamics.hpp"
#include "qel/noise.hpp"
#include "qel/oracle.hpp"

namespace qel {

struct ConditionedEstimate {
    double value = 0.0;       // conditioned Birkhoff average estimate
    double stderr_ = 0.0;     // bootstrap standard error
    int n = 0;                // horizon
    int N = 0;                // particles
    double lambda_hat = 0.0;  // exp(log_norm / n)
    double ess_min = 0.0;
    bool extinct = false;
    std::vector<double> survival_hist;  // alive fraction per step (on extinction or request)
};

struct SimulateOptions {
    int ess_floor = 100;        // minimum effective sample size for reporting
    int bootstrap_reps = 200;
    bool record_survival = false;
    // per-step CSV rows (n, lambda_hat_running, estimate_running, ess)
    std::string trace_csv_path;
};

// Weighted-particle estimate of
//   E[ (1/n) sum_{i<n} h(X_i) * e^{S_n phi} 1_{tau>n} ] / E[ e^{S_n phi} 1_{tau>n} ].
// Soft killing = importance weight e^{phi} in log space; hard killing on
// hole entry / leaving the space; multinomial resampling at ESS < N/2.
// Deterministic for a fixed seed.
ConditionedEstimate run_conditioned(const MapSystem& map, const NoiseKernel& kernel,
                                    const WeightFunction& weight,
                                    const std::function<double(const State&)>& h,
                                    const std::vector<State>& initial, int n, int N,
                                    std::uint64_t seed, const SimulateOptions& opts = {});

// Unweighted hard-killing survival fractions for n = 0..n_max.
std::vector<double> survival_curve(const MapSystem& map, const NoiseKernel& kernel,
                                   const std::vector<State>& initial, int n_max, int N,
                                   std::uint64_t seed);

// Uniform draws over the given cells (default initial law: survivor cover).
std::vector<State> uniform_over_cells(const CellPartition& partition,
                                      const std::vector<std::uint32_t>& cells, int N,
                                      std::uint64_t seed);

// A sub-stochastic chain realized literally as a piecewise-affine Markov
// map of [0,1): cell i is subdivided proportionally to row i of `rows`,
// each piece mapped affinely onto its target cell; the sub-stochastic
// deficiency maps outside [0,1] (absorbed). Lebesgue-uniform starts then
// realize the chain law with eps = 0.
MapSystem chain_map(const DenseMatrix& rows);

}  // namespace qel
