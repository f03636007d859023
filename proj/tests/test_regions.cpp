#include <doctest.h>

#include <algorithm>
#include <set>

#include "qel/dynamics.hpp"
#include "qel/regions.hpp"
#include "qel/sparse.hpp"
#include "qel/spectral.hpp"
#include "qel/ulam.hpp"

using namespace qel;

namespace {

UlamOperator make_global(const MapSystem& m, const CellPartition& part, double eps) {
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!m.in_hole(part.center(i))) active.push_back(i);
    return assemble(m, {eps, 1}, weight_constant(0.0), part, active);
}

}  // namespace

TEST_CASE("closed doubling: single recurrent class") {
    auto m = build_map("doubling", {});
    CellPartition part(m.space, 64);
    auto op = make_global(m, part, 1e-2);
    auto all = survivor_cells(m, part, 6);
    auto rg = build_regions(op, part, all);
    CHECK(rg.class_components.size() == 1);
    CHECK(rg.recurrent[0]);
    CHECK(rg.dominant == 0);
    CHECK(rg.edges.empty());
}

TEST_CASE("two-block toy: transient feeds recurrent") {
    // cells 0..3; block A = {0,1} leaks into block B = {2,3}; B self-sustains
    UlamOperator op;
    TripletBuilder tb(4, 4);
    tb.add(0, 1, 0.4);
    tb.add(1, 2, 0.5);  // A -> B, never back
    tb.add(2, 3, 0.9);
    tb.add(3, 2, 0.9);
    op.matrix = tb.build();
    op.cells = {0, 1, 2, 3};
    op.volumes.assign(4, 0.25);
    op.resolution = 4;

    StateSpace sp;  // [0,1] interval, 4 cells
    CellPartition part(sp, 4);
    // make A and B spatially separate components: cells {0,1} and {2,3}
    // are adjacent, so present them as separate component seeds by passing
    // all cells; adjacency merges 0-1-2-3 into one component, and the class
    // split must come from reachability
    auto rg = build_regions(op, part, {0, 1, 2, 3});
    // one spatial component, classes split by mutual reachability
    REQUIRE(rg.components.size() == 1);
    CHECK(rg.class_components.size() == 1);  // single component -> single class
    CHECK(rg.recurrent[0]);

    // with a spatial gap the transient class separates
    UlamOperator op2;
    TripletBuilder tb2(4, 4);
    tb2.add(0, 3, 0.5);  // A = cell 0 leaks to B = cell 3, never returns
    tb2.add(3, 3, 0.9);
    op2.matrix = tb2.build();
    op2.cells = {0, 1, 2, 3};
    op2.volumes.assign(4, 0.25);
    op2.resolution = 4;
    auto rg2 = build_regions(op2, part, {0, 3});
    REQUIRE(rg2.components.size() == 2);
    REQUIRE(rg2.class_components.size() == 2);
    int cls0 = rg2.component_class[0];  // class of the component holding cell 0
    int cls3 = 1 - cls0;
    CHECK_FALSE(bool(rg2.recurrent[cls0] && rg2.recurrent[cls3]));  // not both
    CHECK(rg2.recurrent[cls3]);
    CHECK(rg2.dominant == cls3);
    REQUIRE(rg2.edges.size() == 1);
    CHECK(rg2.edges[0] == std::make_pair(cls0, cls3));
}

TEST_CASE("condensation DAG is acyclic") {
    auto m = with_hole(build_map("logistic", {{"a", 3.83}}),
                       ball_hole({{0.15614931568360532, 0}, {0.5046664874084134, 0},
                                  {0.9574165975188731, 0}},
                                 0.02, 1));
    CellPartition part(m.space, 512);
    auto op = make_global(m, part, 1e-3);
    auto surv = survivor_cells(m, part, 10);
    auto rg = build_regions(op, part, surv);
    // topological sort must consume every class
    const int n = int(rg.class_components.size());
    std::vector<int> indeg(n, 0);
    for (auto [a, b] : rg.edges) ++indeg[b];
    std::vector<int> order;
    std::set<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.insert(i);
    while (!ready.empty()) {
        int u = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(u);
        for (auto [a, b] : rg.edges)
            if (a == u && --indeg[b] == 0) ready.insert(b);
    }
    CHECK(int(order.size()) == n);
    CHECK(rg.dominant >= 0);
    CHECK(rg.recurrent[rg.dominant]);
}

TEST_CASE("restrict to the only class reproduces the operator") {
    auto m = build_map("doubling", {});
    CellPartition part(m.space, 64);
    auto op = make_global(m, part, 1e-2);
    std::vector<std::uint32_t> all(part.size());
    for (std::uint32_t i = 0; i < part.size(); ++i) all[i] = i;
    auto rg = build_regions(op, part, all);
    auto sub = restrict_to(op, rg, 0);
    REQUIRE(sub.matrix.nnz() == op.matrix.nnz());
    for (std::uint64_t k = 0; k < op.matrix.nnz(); ++k)
        CHECK(sub.matrix.val[k] == op.matrix.val[k]);
}

TEST_CASE("restrict commutes with dual") {
    auto m = with_hole(build_map("doubling", {}), interval_hole(0.75, 1.0));
    CellPartition part(m.space, 128);
    auto op = make_global(m, part, 1e-2);
    auto surv = survivor_cells(m, part, 8);
    auto rg = build_regions(op, part, surv);
    auto sub = restrict_to(op, rg, rg.dominant);
    auto d_of_sub = dual(sub);
    auto sub_of_d = restrict_to(op, rg, rg.dominant);  // same mask
    auto d_full = dual(op);
    // mask the full dual manually and compare
    std::set<std::uint32_t> keep;
    for (int comp : rg.class_components[rg.dominant])
        for (auto c : rg.components[comp]) keep.insert(c);
    std::vector<bool> mask(op.cells.size(), false);
    for (std::uint32_t i = 0; i < op.cells.size(); ++i) mask[i] = keep.count(op.cells[i]) > 0;
    for (std::uint32_t r = 0; r < d_full.matrix.nrows; ++r)
        for (auto k = d_full.matrix.row_ptr[r]; k < d_full.matrix.row_ptr[r + 1]; ++k) {
            if (!mask[r] || !mask[d_full.matrix.col[k]]) continue;
            // find the same entry in d_of_sub
            double got = 0.0;
            for (auto q = d_of_sub.matrix.row_ptr[r]; q < d_of_sub.matrix.row_ptr[r + 1]; ++q)
                if (d_of_sub.matrix.col[q] == d_full.matrix.col[k]) got = d_of_sub.matrix.val[q];
            CHECK(got == doctest::Approx(d_full.matrix.val[k]).epsilon(1e-14));
        }
    (void)sub_of_d;
}

TEST_CASE("dot and json summaries carry the decomposition") {
    auto m = build_map("doubling", {});
    CellPartition part(m.space, 32);
    auto op = make_global(m, part, 1e-2);
    std::vector<std::uint32_t> all(part.size());
    for (std::uint32_t i = 0; i < part.size(); ++i) all[i] = i;
    auto rg = build_regions(op, part, all);
    auto dot = region_dot(rg);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("recurrent") != std::string::npos);
    auto j = region_summary(rg);
    CHECK(j["n_classes"] == 1);
    CHECK(j["dominant"] == 0);
}
