#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qel/dynamics.hpp"
#include "qel/noise.hpp"
#include "qel/sparse.hpp"

namespace qel {

// Discretized weighted annealed Koopman operator over the active cells.
// Row i (local index) has entries
//   P[i][j] = avg over quadrature nodes x of cell i of
//             e^{phi(x)} * Prob(T(x)+w in cell j and not absorbed).
// Mass landing in the hole, in non-active cells, or outside the space is
// dropped (absorbed).
struct UlamOperator {
    SparseMatrix matrix;
    std::vector<std::uint32_t> cells;   // active cells, global ids, sorted
    std::vector<double> volumes;        // per active cell
    bool weight_applied = false;
    double epsilon = 0.0;
    int resolution = 0;
    std::string weight_id;
    bool zero_flagged = false;          // all active cells unreachable
};

struct DualOperator {
    SparseMatrix matrix;  // L[j][i] = P[i][j] * vol_i / vol_j
};

struct AssembleOptions {
    int quad_nodes_per_axis = 3;  // Gauss-Legendre in each cell
    int threads = 1;
};

UlamOperator assemble(const MapSystem& map, const NoiseKernel& kernel, const WeightFunction& weight,
                      const CellPartition& partition, const std::vector<std::uint32_t>& active_cells,
                      const AssembleOptions& opts = {});

DualOperator dual(const UlamOperator& op);

// Sparse mat-vec over active-cell vectors.
std::vector<double> apply(const UlamOperator& op, const std::vector<double>& f);

// Triplet CSV `row,col,value` (local indices, shortest round-trip floats)
// plus JSON sidecar {resolution, epsilon, weight_id, active_cells,
// volumes_digest}. Bit-exact round trip.
void dump_operator(const UlamOperator& op, const std::string& csv_path,
                   const std::string& sidecar_path);
UlamOperator load_operator(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace qel
