#include "qel/regions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "qel/graph.hpp"
#include "qel/spectral.hpp"
#include "qel/util.hpp"

namespace qel {

RegionGraph build_regions(const UlamOperator& op, const CellPartition& partition,
                          const std::vector<std::uint32_t>& component_cells) {
    RegionGraph rg;
    const double thresh = 1e-12 * op.matrix.max_entry();

    std::vector<std::int32_t> op_local(partition.size(), -1);
    for (std::uint32_t i = 0; i < op.cells.size(); ++i) op_local[op.cells[i]] = std::int32_t(i);

    // connected components of the survivor cover by cell adjacency
    std::vector<std::uint32_t> cells;
    for (auto c : component_cells)
        if (op_local[c] >= 0) cells.push_back(c);
    std::sort(cells.begin(), cells.end());
    std::map<std::uint32_t, int> comp_of;
    for (auto c : cells) comp_of[c] = -1;
    int n_comp = 0;
    for (auto c : cells) {
        if (comp_of[c] != -1) continue;
        std::queue<std::uint32_t> bfs;
        bfs.push(c);
        comp_of[c] = n_comp;
        rg.components.emplace_back();
        while (!bfs.empty()) {
            auto u = bfs.front();
            bfs.pop();
            rg.components[n_comp].push_back(u);
            for (auto nb : partition.neighbors(u)) {
                auto it = comp_of.find(nb);
                if (it != comp_of.end() && it->second == -1) {
                    it->second = n_comp;
                    bfs.push(nb);
                }
            }
        }
        std::sort(rg.components[n_comp].begin(), rg.components[n_comp].end());
        ++n_comp;
    }

    // component-level one-step reachability from the operator support
    std::vector<std::set<int>> succ(n_comp);
    for (std::uint32_t r = 0; r < op.matrix.nrows; ++r) {
        auto itr = comp_of.find(op.cells[r]);
        if (itr == comp_of.end()) continue;
        for (auto k = op.matrix.row_ptr[r]; k < op.matrix.row_ptr[r + 1]; ++k) {
            if (op.matrix.val[k] <= thresh) continue;
            auto itc = comp_of.find(op.cells[op.matrix.col[k]]);
            if (itc == comp_of.end()) continue;
            succ[itr->second].insert(itc->second);
        }
    }
    std::vector<std::vector<int>> adj(n_comp);
    for (int i = 0; i < n_comp; ++i) adj[i].assign(succ[i].begin(), succ[i].end());

    auto sccs = scc_of_digraph(adj);
    const int n_class = int(sccs.size());
    rg.component_class.assign(n_comp, -1);
    rg.class_components.resize(n_class);
    for (int s = 0; s < n_class; ++s)
        for (int comp : sccs[s]) {
            rg.component_class[comp] = s;
            rg.class_components[s].push_back(comp);
        }

    std::set<std::pair<int, int>> class_edges;
    for (int i = 0; i < n_comp; ++i)
        for (int j : adj[i]) {
            int a = rg.component_class[i], b = rg.component_class[j];
            if (a != b) class_edges.insert({a, b});
        }
    rg.edges.assign(class_edges.begin(), class_edges.end());

    // Cell-level communicating sets of the operator support. The class's
    // eigenvalue is taken on the union of communicating sets meeting the
    // class: the cover undershoots the noise-smeared eigenfunction support,
    // so restricting to cover cells alone biases lambda low.
    std::vector<std::vector<int>> cell_adj(op.matrix.nrows);
    for (std::uint32_t r = 0; r < op.matrix.nrows; ++r)
        for (auto k = op.matrix.row_ptr[r]; k < op.matrix.row_ptr[r + 1]; ++k)
            if (op.matrix.val[k] > thresh) cell_adj[r].push_back(int(op.matrix.col[k]));
    auto cell_sccs = scc_of_digraph(cell_adj);
    std::vector<int> cell_scc_of(op.matrix.nrows, -1);
    for (size_t s = 0; s < cell_sccs.size(); ++s)
        for (int r : cell_sccs[s]) cell_scc_of[r] = int(s);

    // class-restricted leading eigenvalues (period-aware)
    rg.class_lambda.assign(n_class, 0.0);
    rg.class_period.assign(n_class, 1);
    std::vector<bool> has_cycle(n_class, false);
    for (int s = 0; s < n_class; ++s) {
        std::set<int> groups;
        for (int comp : rg.class_components[s])
            for (auto c : rg.components[comp]) groups.insert(cell_scc_of[op_local[c]]);
        std::vector<std::uint32_t> rows;
        for (int g : groups)
            for (int r : cell_sccs[g]) rows.push_back(std::uint32_t(r));
        std::sort(rows.begin(), rows.end());
        TripletBuilder tb(std::uint32_t(rows.size()), std::uint32_t(rows.size()));
        std::vector<std::int32_t> sub_local(op.matrix.nrows, -1);
        for (std::uint32_t i = 0; i < rows.size(); ++i) sub_local[rows[i]] = std::int32_t(i);
        for (std::uint32_t i = 0; i < rows.size(); ++i) {
            auto r = rows[i];
            for (auto k = op.matrix.row_ptr[r]; k < op.matrix.row_ptr[r + 1]; ++k)
                if (op.matrix.val[k] > thresh && sub_local[op.matrix.col[k]] >= 0)
                    tb.add(i, std::uint32_t(sub_local[op.matrix.col[k]]), op.matrix.val[k]);
        }
        auto sub = tb.build();
        auto info = detect_period(sub);
        if (info.dominant_scc >= 0) {
            has_cycle[s] = true;
            rg.class_lambda[s] = info.scc_lambda[info.dominant_scc];
            rg.class_period[s] = info.k;
        }
    }

    // recurrence proxy: spectral persistence above the all-transient floor
    double floor = 0.0;
    for (int s = 0; s < n_class; ++s)
        if (!has_cycle[s]) floor = std::max(floor, rg.class_lambda[s]);
    floor = std::max(floor, 1e-12);
    rg.transient_floor = floor;
    rg.recurrent.assign(n_class, false);
    for (int s = 0; s < n_class; ++s)
        rg.recurrent[s] = has_cycle[s] && rg.class_lambda[s] > 10.0 * floor;

    for (int s = 0; s < n_class; ++s)
        if (rg.recurrent[s] && (rg.dominant < 0 || rg.class_lambda[s] > rg.class_lambda[rg.dominant]))
            rg.dominant = s;
    if (rg.dominant < 0)
        throw std::runtime_error("build_regions: no recurrent class found");
    return rg;
}

UlamOperator restrict_to(const UlamOperator& op, const RegionGraph& rg, int class_index) {
    if (class_index < 0 || class_index >= int(rg.class_components.size()))
        throw std::invalid_argument("restrict_to: invalid class index");
    std::set<std::uint32_t> keep;  // global cell ids of the class
    for (int comp : rg.class_components[class_index])
        for (auto c : rg.components[comp]) keep.insert(c);

    UlamOperator out = op;
    std::vector<bool> mask(op.matrix.nrows, false);
    for (std::uint32_t i = 0; i < op.cells.size(); ++i)
        if (keep.count(op.cells[i])) mask[i] = true;

    TripletBuilder tb(op.matrix.nrows, op.matrix.ncols);
    for (std::uint32_t r = 0; r < op.matrix.nrows; ++r) {
        if (!mask[r]) continue;
        for (auto k = op.matrix.row_ptr[r]; k < op.matrix.row_ptr[r + 1]; ++k)
            if (mask[op.matrix.col[k]]) tb.add(r, op.matrix.col[k], op.matrix.val[k]);
    }
    out.matrix = tb.build();
    out.zero_flagged = out.matrix.nnz() == 0;
    return out;
}

std::string region_dot(const RegionGraph& rg) {
    std::string s = "digraph regions {\n";
    for (size_t i = 0; i < rg.class_components.size(); ++i) {
        s += "  M" + std::to_string(i) + " [label=\"M" + std::to_string(i) +
             "\\nlambda=" + fmt_double(rg.class_lambda[i]) +
             (rg.recurrent[i] ? "\\nrecurrent" : "\\ntransient") +
             (int(i) == rg.dominant ? " (dominant)" : "") + "\"];\n";
    }
    for (auto [a, b] : rg.edges)
        s += "  M" + std::to_string(a) + " -> M" + std::to_string(b) + ";\n";
    s += "}\n";
    return s;
}

nlohmann::json region_summary(const RegionGraph& rg) {
    nlohmann::json j;
    j["n_components"] = rg.components.size();
    j["n_classes"] = rg.class_components.size();
    std::vector<int> rec;
    for (size_t i = 0; i < rg.recurrent.size(); ++i)
        if (rg.recurrent[i]) rec.push_back(int(i));
    j["recurrent"] = rec;
    j["dominant"] = rg.dominant;
    j["class_lambda"] = rg.class_lambda;
    j["class_period"] = rg.class_period;
    j["recurrence_proxy"] =
        "recurrent iff class support has a cycle and lambda_class > 10x all-transient floor";
    j["transient_floor"] = rg.transient_floor;
    return j;
}

}  // namespace qel
