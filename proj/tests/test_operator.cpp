#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "qel/dynamics.hpp"
#include "qel/spectral.hpp"
#include "qel/ulam.hpp"

using namespace qel;

namespace {

UlamOperator doubling_op(double eps, int res, double hole_lo = -1.0, double phi = 0.0) {
    auto m = build_map("doubling", {});
    if (hole_lo >= 0.0) m = with_hole(std::move(m), interval_hole(hole_lo, 1.0));
    CellPartition part(m.space, res);
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!m.in_hole(part.center(i))) active.push_back(i);
    return assemble(m, {eps, 1}, weight_constant(phi), part, active);
}

double vol_pair(const UlamOperator& op, const std::vector<double>& f,
                const std::vector<double>& g) {
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] * op.volumes[i];
    return s;
}

std::vector<double> apply_mat(const SparseMatrix& A, const std::vector<double>& x) {
    return A.apply(x);
}

}  // namespace

TEST_CASE("closed doubling operator is stochastic") {
    auto op = doubling_op(1e-2, 128);
    CHECK(op.matrix.max_row_sum() == doctest::Approx(1.0).epsilon(1e-12));
    auto ones = std::vector<double>(op.cells.size(), 1.0);
    auto out = apply_mat(op.matrix, ones);
    for (double v : out) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hole drains mass") {
    auto op = doubling_op(1e-2, 128, 0.75);
    double mn = 2.0;
    auto ones = std::vector<double>(op.cells.size(), 1.0);
    auto out = apply_mat(op.matrix, ones);
    for (double v : out) mn = std::min(mn, v);
    CHECK(mn < 1.0 - 1e-6);
    CHECK(op.matrix.max_row_sum() <= 1.0 + 1e-12);
}

TEST_CASE("duality pairing <Lf,g>_vol = <f,Pg>_vol on random pairs") {
    auto op = doubling_op(3e-3, 256, 0.75);
    auto L = dual(op);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto n = op.cells.size();
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(n), g(n);
        for (auto& v : f) v = u(rng);
        for (auto& v : g) v = u(rng);
        double lhs = vol_pair(op, apply_mat(L.matrix, f), g);
        double rhs = vol_pair(op, f, apply_mat(op.matrix, g));
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("constant weight shift multiplies lambda and preserves nu") {
    const double c = 0.37;
    auto op0 = doubling_op(1e-2, 256, 0.75, 0.0);
    auto op1 = doubling_op(1e-2, 256, 0.75, c);
    auto t0 = solve_triple(op0);
    auto t1 = solve_triple(op1);
    CHECK(t1.lambda == doctest::Approx(t0.lambda * std::exp(c)).epsilon(1e-10));
    auto nu0 = quasi_ergodic(t0, op0);
    auto nu1 = quasi_ergodic(t1, op1);
    for (size_t i = 0; i < nu0.weights.size(); ++i)
        CHECK(std::fabs(nu0.weights[i] - nu1.weights[i]) <= 1e-10);
}

TEST_CASE("epsilon=0 assembles the classic Ulam operator") {
    auto op = doubling_op(0.0, 64);
    CHECK(op.epsilon == 0.0);
    CHECK(op.matrix.max_row_sum() == doctest::Approx(1.0).epsilon(1e-12));
    auto t = solve_triple(op);
    CHECK(t.lambda == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("operator dump/load round-trips bit-exactly") {
    auto op = doubling_op(1e-2, 64, 0.75, 0.21);
    std::string csv = "/tmp/qel_test_op.csv", side = "/tmp/qel_test_op.json";
    dump_operator(op, csv, side);
    auto back = load_operator(csv, side);
    REQUIRE(back.matrix.nnz() == op.matrix.nnz());
    REQUIRE(back.cells == op.cells);
    for (std::uint64_t k = 0; k < op.matrix.nnz(); ++k) {
        CHECK(back.matrix.col[k] == op.matrix.col[k]);
        CHECK(back.matrix.val[k] == op.matrix.val[k]);  // exact, not approx
    }
    CHECK(back.epsilon == op.epsilon);
    std::remove(csv.c_str());
    std::remove(side.c_str());
}

TEST_CASE("threaded assembly matches single-threaded") {
    auto m = with_hole(build_map("doubling", {}), interval_hole(0.75, 1.0));
    CellPartition part(m.space, 512);
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!m.in_hole(part.center(i))) active.push_back(i);
    auto w = weight_constant(0.0);
    auto a1 = assemble(m, {1e-3, 1}, w, part, active, {3, 1});
    auto a4 = assemble(m, {1e-3, 1}, w, part, active, {3, 4});
    REQUIRE(a1.matrix.nnz() == a4.matrix.nnz());
    for (std::uint64_t k = 0; k < a1.matrix.nnz(); ++k) CHECK(a1.matrix.val[k] == a4.matrix.val[k]);
}
