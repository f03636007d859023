#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qel/partition.hpp"
#include "qel/ulam.hpp"

namespace qel {

// Decomposition of the survivor cell cover into connected components,
// mutually-reachable classes (SCCs of the component digraph), and the
// acyclic condensation DAG. The dominant class carries the largest
// class-restricted leading eigenvalue among recurrent classes.
struct RegionGraph {
    std::vector<std::vector<std::uint32_t>> components;  // global cell ids
    std::vector<int> component_class;                    // component -> class
    std::vector<std::vector<int>> class_components;
    std::vector<bool> recurrent;
    std::vector<double> class_lambda;
    std::vector<int> class_period;
    std::vector<std::pair<int, int>> edges;              // condensation DAG
    int dominant = -1;
    double transient_floor = 0.0;                        // recurrence proxy floor
};

// `component_cells`: substrate of the component construction (the survivor
// cover, possibly a strict subset of the operator's active cells).
RegionGraph build_regions(const UlamOperator& op, const CellPartition& partition,
                          const std::vector<std::uint32_t>& component_cells);

// Operator zeroed outside the class's cells (P_{A,eps} f = P(1_A f)).
UlamOperator restrict_to(const UlamOperator& op, const RegionGraph& rg, int class_index);

std::string region_dot(const RegionGraph& rg);
nlohmann::json region_summary(const RegionGraph& rg);

}  // namespace qel
