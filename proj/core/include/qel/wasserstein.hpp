#pragma once

#include <vector>

#include "qel/partition.hpp"

namespace qel {

// W1 between two probability measures given as per-cell weights over the
// full partition (piecewise-uniform densities). 1-D: exact CDF-difference
// integral; 2-D: sliced W1 over 64 fixed directions (cell-center atoms).
double w1_distance(const CellPartition& partition, const std::vector<double>& a,
                   const std::vector<double>& b);

}  // namespace qel
