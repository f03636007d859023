#include <doctest.h>

#include <cmath>
#include <random>

#include "qel/oracle.hpp"

using namespace qel;

namespace {
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("dense perron on a known 2x2") {
    PerronData p = dense_perron({{0.5, 0.4}, {0.3, 0.6}});
    CHECK(p.lambda == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(p.period == 1);
    // eigenvector directions: g = (1,1), m proportional to (3,4)
    CHECK(p.g[0] == doctest::Approx(p.g[1]).epsilon(1e-10));
    CHECK(p.m[1] / p.m[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("dense perron reports the rotated family of a 2-cycle") {
    PerronData p = dense_perron({{0.0, 1.0}, {1.0, 0.0}});
    CHECK(p.lambda == doctest::Approx(1.0));
    CHECK(p.period == 2);
    REQUIRE(p.rotated.size() == 2);
}

TEST_CASE("doubling hole [3/4,1) is the golden-mean shift") {
    auto model = doubling_hole_model(12, [](double x) { return x >= 0.75 && x < 1.0; },
                                     [](double) { return 0.0; });
    auto eq = pressure(model);
    CHECK(eq.pressure == doctest::Approx(std::log(kGolden / 2.0)).epsilon(1e-12));
    CHECK(eq.entropy == doctest::Approx(std::log(kGolden)).epsilon(1e-10));
    CHECK(eq.integral == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("doubling hole [1/2,3/4) forbids word 10, lambda = 1/2") {
    // survivors are 0^a 1^inf: adjacency spectral radius is exactly 1
    // for the subshift, so pressure = -log 2 and the escape eigenvalue is 1/2
    auto model = doubling_hole_model(10, [](double x) { return x >= 0.5 && x < 0.75; },
                                     [](double) { return 0.0; });
    auto eq = pressure(model);
    CHECK(eq.pressure == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(eq.entropy == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("variational identity holds on the corpus") {
    std::vector<MarkovModel> corpus;
    corpus.push_back(doubling_hole_model(10, [](double x) { return x >= 0.75; },
                                         [](double) { return 0.0; }));
    corpus.push_back(doubling_hole_model(8, [](double x) { return x >= 0.4 && x < 0.55; },
                                         [](double x) { return 0.2 * x; }));
    corpus.push_back(logistic_repeller_model(3.83, 10, 0.02, [](double) { return 0.0; }));
    corpus.push_back(fixed_point_model(3.83, 1.0));
    for (const auto& m : corpus) {
        auto eq = pressure(m);
        CHECK(std::fabs(eq.pressure - eq.entropy - eq.integral) <= 1e-9);
    }
}

TEST_CASE("fixed point model pressure is -t log deriv exactly") {
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
        auto eq = pressure(fixed_point_model(3.83, t));
        CHECK(eq.pressure == doctest::Approx(-t * std::log(3.83)).epsilon(1e-15));
        CHECK(eq.entropy == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("logistic repeller at tiny hole radius has golden-mean entropy") {
    auto model = logistic_repeller_model(3.83, 12, 0.001,
                                         [](double x) {
                                             // phi = log|T'| makes psi = 0: pressure = h_top
                                             double d = std::fabs(3.83 * (1.0 - 2.0 * x));
                                             return std::log(std::max(d, 1e-300));
                                         });
    auto eq = pressure(model);
    CHECK(eq.pressure == doctest::Approx(std::log(kGolden)).epsilon(1e-9));
}

TEST_CASE("exact conditioned average matches the QEM weights") {
    // fixed small sub-stochastic chain with weights baked in
    DenseMatrix A = {{0.30, 0.35, 0.20}, {0.25, 0.30, 0.30}, {0.20, 0.40, 0.25}};
    auto p = dense_perron(A);
    double tot = 0.0;
    std::vector<double> nu(3);
    for (int i = 0; i < 3; ++i) tot += p.g[i] * p.m[i];
    for (int i = 0; i < 3; ++i) nu[i] = p.g[i] * p.m[i] / tot;
    for (int coord = 0; coord < 3; ++coord) {
        std::vector<double> h(3, 0.0);
        h[coord] = 1.0;
        double avg = exact_conditioned_average(A, h, 500, 0);
        CHECK(avg == doctest::Approx(nu[coord]).epsilon(1e-2));
    }
}

TEST_CASE("snapshot oscillates on a periodic chain while the average settles") {
    DenseMatrix A = {{0.0, 0.9}, {0.8, 0.0}};
    std::vector<double> h = {1.0, 0.0};
    double s1 = exact_conditioned_snapshot(A, h, 100, 0);
    double s2 = exact_conditioned_snapshot(A, h, 101, 0);
    CHECK(std::fabs(s1 - s2) > 0.5);  // flips between the two states
    double a1 = exact_conditioned_average(A, h, 400, 0);
    double a2 = exact_conditioned_average(A, h, 401, 0);
    CHECK(std::fabs(a1 - a2) < 1e-2);
}

TEST_CASE("model serialization carries states and potential") {
    auto model = fixed_point_model(2.0, 1.0);
    auto j = model_to_json(model);
    CHECK(j["states"].size() == 1);
    auto eq = pressure(model);
    auto ej = equilibrium_to_json(eq);
    CHECK(ej.contains("pressure"));
    CHECK(ej.contains("entropy"));
}
