#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qel/dynamics.hpp"
#include "qel/sparse.hpp"
#include "qel/spectral.hpp"
#include "qel/ulam.hpp"

using namespace qel;

namespace {

UlamOperator synthetic(const std::vector<std::vector<double>>& dense) {
    UlamOperator op;
    auto n = std::uint32_t(dense.size());
    TripletBuilder tb(n, n);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
            if (dense[i][j] != 0.0) tb.add(i, j, dense[i][j]);
    op.matrix = tb.build();
    op.cells.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) op.cells[i] = i;
    op.volumes.assign(n, 1.0 / n);
    op.resolution = int(n);
    return op;
}

UlamOperator closed_doubling(double phi) {
    auto m = build_map("doubling", {});
    CellPartition part(m.space, 256);
    std::vector<std::uint32_t> active(part.size());
    for (std::uint32_t i = 0; i < part.size(); ++i) active[i] = i;
    return assemble(m, {1e-3, 1}, weight_constant(phi), part, active);
}

}  // namespace

TEST_CASE("power iteration on a known 2x2") {
    // [[0.5, 0.4],[0.3, 0.6]] -> lambda = (1.1+sqrt(0.49))/2 = 0.9
    auto op = synthetic({{0.5, 0.4}, {0.3, 0.6}});
    auto r = power_leading(op.matrix);
    CHECK(r.converged);
    CHECK(r.lambda == doctest::Approx(0.9).epsilon(1e-10));
}

TEST_CASE("nilpotent support gives lambda 0") {
    auto op = synthetic({{0.0, 1.0}, {0.0, 0.0}});
    auto r = power_leading(op.matrix);
    CHECK(r.converged);
    CHECK(r.lambda == 0.0);
}

TEST_CASE("period detection: aperiodic doubling operator") {
    auto op = closed_doubling(0.0);
    auto info = detect_period(op.matrix);
    CHECK(info.k == 1);
}

TEST_CASE("period detection and cyclic flow on a 2-cycle") {
    auto op = synthetic({{0.0, 0.8}, {0.9, 0.0}});
    auto info = detect_period(op.matrix);
    CHECK(info.k == 2);
    auto t = solve_triple(op);
    CHECK(t.period == 2);
    CHECK(t.lambda == doctest::Approx(std::sqrt(0.72)).epsilon(1e-10));
}

TEST_CASE("3-cycle chain: classes, g_i flow, and rotated eigenvectors") {
    const double a0 = 0.7, a1 = 0.9, a2 = 0.8;
    auto op = synthetic({{0, a0, 0}, {0, 0, a1}, {a2, 0, 0}});
    auto t = solve_triple(op);
    const int k = 3;
    REQUIRE(t.period == k);
    const double lam = std::cbrt(a0 * a1 * a2);
    CHECK(t.lambda == doctest::Approx(lam).epsilon(1e-10));

    // classes are singletons here; mass of 1_{C_i} under P lands in C_{i-1 mod k}
    for (int i = 0; i < 3; ++i) REQUIRE(t.cyclic_class[i] >= 0);
    std::vector<double> ind(3);
    for (int cls = 0; cls < k; ++cls) {
        for (int i = 0; i < 3; ++i) ind[i] = t.cyclic_class[i] == cls ? 1.0 : 0.0;
        auto out = op.matrix.apply(ind);
        for (int i = 0; i < 3; ++i)
            if (out[i] > 1e-14) CHECK(t.cyclic_class[i] == (cls + k - 1) % k);
    }

    // g_i = k * 1_{C_i} * g satisfies P g_i = lambda g_{i-1}
    for (int cls = 0; cls < k; ++cls) {
        std::vector<double> gi(3), gprev(3);
        for (int i = 0; i < 3; ++i) {
            gi[i] = (t.cyclic_class[i] == cls ? k * t.g[i] : 0.0);
            gprev[i] = (t.cyclic_class[i] == (cls + k - 1) % k ? k * t.g[i] : 0.0);
        }
        auto out = op.matrix.apply(gi);
        for (int i = 0; i < 3; ++i)
            CHECK(std::fabs(out[i] - t.lambda * gprev[i]) <= 1e-9 * std::max(1.0, t.lambda));
    }

    // f_l = (1/k) sum_j e^{2 pi i j l / k} g_j are eigenvectors for lam e^{2 pi i l/k}
    using cd = std::complex<double>;
    for (int l = 0; l < k; ++l) {
        std::vector<cd> f(3, 0.0);
        for (int j = 0; j < k; ++j) {
            cd phase = std::polar(1.0, 2.0 * M_PI * j * l / k);
            for (int i = 0; i < 3; ++i)
                if (t.cyclic_class[i] == j) f[i] += phase * (double(k) * t.g[i]) / double(k);
        }
        // complex matvec through the real sparse matrix
        std::vector<cd> Af(3, 0.0);
        std::vector<double> re(3), im(3);
        for (int i = 0; i < 3; ++i) re[i] = f[i].real(), im[i] = f[i].imag();
        auto Ar = op.matrix.apply(re);
        auto Ai = op.matrix.apply(im);
        cd mu = std::polar(lam, 2.0 * M_PI * l / k);
        for (int i = 0; i < 3; ++i) {
            cd lhs(Ar[i], Ai[i]);
            CHECK(std::abs(lhs - mu * f[i]) <= 1e-9);
        }
    }
}

TEST_CASE("closed doubling triple: lambda 1, flat g and m") {
    auto op = closed_doubling(0.0);
    auto t = solve_triple(op);
    CHECK(t.lambda == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : t.g) CHECK(v == doctest::Approx(t.g[0]).epsilon(1e-9));
    for (double v : t.m) CHECK(v == doctest::Approx(t.m[0]).epsilon(1e-9));
    // normalizations
    double gm = 0.0, mm = 0.0;
    for (size_t i = 0; i < t.g.size(); ++i) {
        gm += t.g[i] * t.m[i] * op.volumes[i];
        mm += t.m[i] * op.volumes[i];
    }
    CHECK(gm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant weight log 2 gives lambda 2 (doubling entropy)") {
    auto op = closed_doubling(std::log(2.0));
    auto t = solve_triple(op);
    CHECK(t.lambda == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::log(t.lambda) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("quasi-ergodic weights are a probability vector on the support") {
    auto m = with_hole(build_map("doubling", {}), interval_hole(0.75, 1.0));
    CellPartition part(m.space, 256);
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!m.in_hole(part.center(i))) active.push_back(i);
    auto op = assemble(m, {1e-2, 1}, weight_constant(0.0), part, active);
    auto t = solve_triple(op);
    auto nu = quasi_ergodic(t, op);
    double total = 0.0;
    for (double v : nu.weights) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(nu.support.empty());
}
