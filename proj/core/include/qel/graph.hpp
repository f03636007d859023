#pragma once

#include <vector>

namespace qel {

// Tarjan strongly connected components of an adjacency-list digraph.
std::vector<std::vector<int>> scc_of_digraph(const std::vector<std::vector<int>>& adj);

}  // namespace qel
