#include <benchmark/benchmark.h>

#include "qel/dynamics.hpp"
#include "qel/noise.hpp"
#include "qel/spectral.hpp"
#include "qel/ulam.hpp"

namespace {

qel::UlamOperator make_op(int res, double eps) {
    auto map = qel::with_hole(qel::build_map("doubling", {}), qel::interval_hole(0.75, 1.0));
    qel::CellPartition part(map.space, res);
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!map.in_hole(part.center(i))) active.push_back(i);
    return qel::assemble(map, {eps, 1}, qel::weight_constant(0.0), part, active);
}

void bm_assemble(benchmark::State& state) {
    auto map = qel::with_hole(qel::build_map("doubling", {}), qel::interval_hole(0.75, 1.0));
    int res = int(state.range(0));
    qel::CellPartition part(map.space, res);
    std::vector<std::uint32_t> active;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!map.in_hole(part.center(i))) active.push_back(i);
    auto w = qel::weight_constant(0.0);
    for (auto _ : state) {
        auto op = qel::assemble(map, {1e-3, 1}, w, part, active);
        benchmark::DoNotOptimize(op.matrix.val.data());
    }
    state.SetItemsProcessed(state.iterations() * active.size());
}
BENCHMARK(bm_assemble)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void bm_power(benchmark::State& state) {
    auto op = make_op(int(state.range(0)), 1e-3);
    for (auto _ : state) {
        auto r = qel::power_leading(op.matrix);
        benchmark::DoNotOptimize(r.lambda);
    }
}
BENCHMARK(bm_power)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void bm_triple(benchmark::State& state) {
    auto op = make_op(int(state.range(0)), 1e-3);
    for (auto _ : state) {
        auto t = qel::solve_triple(op);
        benchmark::DoNotOptimize(t.lambda);
    }
}
BENCHMARK(bm_triple)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
