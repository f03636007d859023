#include <doctest.h>

#include <cmath>
#include <random>

#include "qel/oracle.hpp"
#include "qel/simulate.hpp"
#include "qel/spectral.hpp"
#include "qel/ulam.hpp"

using namespace qel;

namespace {

// 3-state strictly sub-stochastic chain used throughout
const DenseMatrix kChain = {{0.30, 0.35, 0.20}, {0.25, 0.30, 0.30}, {0.20, 0.40, 0.25}};

// iid uniform starts; a stratified grid would correlate with the chain
// map's rational piece boundaries and bias deterministic survival counts
std::vector<State> chain_uniform_start(int states, int N) {
    std::mt19937_64 g(1234);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<State> out;
    for (int i = 0; i < N; ++i) out.push_back({u(g), 0.0});
    (void)states;
    return out;
}

}  // namespace

TEST_CASE("chain_map realizes the chain law at epsilon 0") {
    auto m = chain_map(kChain);
    // point in cell 0: first sub-interval of width 0.30/3 maps onto cell 0
    auto y = m.eval({0.05 / 3.0, 0});  // u = 0.05 inside row 0, below 0.30
    CHECK(y[0] >= 0.0);
    CHECK(y[0] < 1.0 / 3.0);
    // deficiency of row 0 is 0.15: the tail of the cell is absorbed
    auto z = m.eval({(1.0 - 0.05) / 3.0, 0});  // u = 0.95 > 0.85
    CHECK_FALSE(m.space.contains(z));
}

TEST_CASE("conditioned particle estimate matches the spectral triple") {
    // genuine noise is required here: at eps = 0 the dynamics are
    // deterministic, so resampled copies never diversify and the genealogy
    // collapses onto a few long-lived initial points
    auto m = with_hole(build_map("doubling", {}), interval_hole(0.75, 1.0));
    NoiseKernel k{1e-2, 1};
    CellPartition part(m.space, 2048);
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!m.in_hole(part.center(i))) active.push_back(i);
    auto op = assemble(m, k, weight_constant(0.0), part, active);
    auto tr = solve_triple(op);
    auto nu = quasi_ergodic(tr, op);
    double ref = 0.0;
    for (size_t i = 0; i < nu.weights.size(); ++i)
        ref += nu.weights[i] * part.center(op.cells[i])[0];

    auto hx = [](const State& x) { return x[0]; };
    auto init = uniform_over_cells(part, active, 20000, 1);
    auto est = run_conditioned(m, k, weight_constant(0.0), hx, init, 100, 20000, 9, {});
    CHECK_FALSE(est.extinct);
    CHECK(std::fabs(est.value - ref) <= std::max(3.0 * est.stderr_, 5e-3));
    // growth rate agrees with the leading eigenvalue
    CHECK(est.lambda_hat == doctest::Approx(tr.lambda).epsilon(0.02));
}

TEST_CASE("soft killing via the weight matches a hard sub-stochastic chain") {
    // constant weight phi = log 0.8 scales lambda by 0.8
    auto m = chain_map(kChain);
    NoiseKernel k{0.0, 1};
    auto hx = [](const State& x) { return x[0]; };
    auto base = run_conditioned(m, k, weight_constant(0.0), hx, chain_uniform_start(3, 5000), 100,
                                5000, 5, {});
    auto soft = run_conditioned(m, k, weight_constant(std::log(0.8)), hx,
                                chain_uniform_start(3, 5000), 100, 5000, 5, {});
    CHECK(soft.lambda_hat == doctest::Approx(0.8 * base.lambda_hat).epsilon(1e-9));
    CHECK(soft.value == doctest::Approx(base.value).epsilon(1e-9));
}

TEST_CASE("fixed seed is fully deterministic") {
    auto m = chain_map(kChain);
    NoiseKernel k{0.0, 1};
    auto hx = [](const State& x) { return x[0]; };
    auto a = run_conditioned(m, k, weight_constant(0.0), hx, chain_uniform_start(3, 1000), 50, 1000,
                             123, {});
    auto b = run_conditioned(m, k, weight_constant(0.0), hx, chain_uniform_start(3, 1000), 50, 1000,
                             123, {});
    CHECK(a.value == b.value);
    CHECK(a.lambda_hat == b.lambda_hat);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("survival curve is monotone and starts at one") {
    auto m = chain_map(kChain);
    NoiseKernel k{0.0, 1};
    auto curve = survival_curve(m, k, chain_uniform_start(3, 20000), 30, 20000, 3);
    REQUIRE(curve.size() == 31);
    CHECK(curve[0] == 1.0);
    for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1]);
    // every row sums to 0.85, so survival is exactly 0.85^t in law
    CHECK(curve[1] == doctest::Approx(0.85).epsilon(0.02));
    CHECK(curve.back() == doctest::Approx(std::pow(0.85, 30)).epsilon(0.5));
}

TEST_CASE("input validation") {
    auto m = chain_map(kChain);
    NoiseKernel k{0.0, 1};
    auto hx = [](const State& x) { return x[0]; };
    CHECK_THROWS(run_conditioned(m, k, weight_constant(0.0), hx, chain_uniform_start(3, 10), 10, 10,
                                 1, {}));  // N too small
    CHECK_THROWS(run_conditioned(m, k, weight_constant(0.0), hx, chain_uniform_start(3, 100), 0,
                                 100, 1, {}));  // n < 1
    CHECK_THROWS(run_conditioned(m, k, weight_constant(0.0), hx, {}, 10, 100, 1, {}));
}
