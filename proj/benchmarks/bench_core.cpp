#include <vector>

#include <benchmark/benchmark.h>

#include "lclt/charfn.hpp"
#include "lclt/decoupling.hpp"
#include "lclt/exact_oracle.hpp"
#include "lclt/graph.hpp"
#include "lclt/metrics.hpp"

namespace {

double prob(const benchmark::State& state) { return static_cast<double>(state.range(1)) / 1000.0; }

void BM_SampleGnp(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    lclt::GnpSample g;
    std::uint64_t stream = 0;
    for (auto _ : state) {
        lclt::sample_gnp_into(g, n, prob(state), 7, stream++);
        benchmark::DoNotOptimize(g.row(0).data());
    }
}
BENCHMARK(BM_SampleGnp)->Args({64, 400})->Args({512, 354})->Args({512, 20})->Args({4096, 10});

void BM_CountTriangles(benchmark::State& state) {
    const auto g = lclt::sample_gnp(static_cast<std::size_t>(state.range(0)), prob(state), 7, 0);
    for (auto _ : state) benchmark::DoNotOptimize(lclt::count_triangles(g));
}
BENCHMARK(BM_CountTriangles)->Args({64, 400})->Args({128, 400})->Args({256, 400})->Args({512, 354});

void BM_CountTrianglesNaive(benchmark::State& state) {
    const auto g = lclt::sample_gnp(static_cast<std::size_t>(state.range(0)), prob(state), 7, 0);
    for (auto _ : state) benchmark::DoNotOptimize(lclt::count_triangles_naive(g));
}
BENCHMARK(BM_CountTrianglesNaive)->Args({64, 400})->Args({128, 400});

void BM_BuildTable(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(lclt::build_table(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BuildTable)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_EstimateCharfn(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 0; i < 64; ++i) grid.push_back(0.05 * i);
    for (auto _ : state) benchmark::DoNotOptimize(lclt::estimate_charfn(128, 0.3, grid, 10000, 3));
}
BENCHMARK(BM_EstimateCharfn)->Unit(benchmark::kMillisecond);

void BM_ComputeAlphas(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto part = lclt::make_partition(n, n / 2, 1);
    const auto g0 = lclt::sample_gnp(n, 0.2, 1, 0);
    const auto g1 = lclt::sample_gnp(n, 0.2, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lclt::compute_alphas(g0, g1, part));
}
BENCHMARK(BM_ComputeAlphas)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_InvertCharfn(benchmark::State& state) {
    const auto table = lclt::build_table(6);
    const auto charfn = [&](double theta) { return lclt::exact_charfn(table, 0.3, theta); };
    for (auto _ : state) benchmark::DoNotOptimize(lclt::invert_charfn(charfn, 6, 0.3, 0, 20));
}
BENCHMARK(BM_InvertCharfn)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
