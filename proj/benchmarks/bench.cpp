#include <benchmark/benchmark.h>

#include <random>

#include "sandpile/dynamics.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/snf.hpp"
#include "sandpile/theorems.hpp"

namespace {

void BM_SmithNormalForm(benchmark::State& state) {
    auto tree = sandpile::build_tree(3, static_cast<int>(state.range(0)));
    auto lap = sandpile::reduced_laplacian(tree.graph);
    for (auto _ : state) {
        auto snf = sandpile::smith_normal_form(lap);
        benchmark::DoNotOptimize(snf.diagonal);
    }
    state.SetLabel(std::to_string(lap.rows()) + "x" + std::to_string(lap.cols()));
}
BENCHMARK(BM_SmithNormalForm)->DenseRange(2, 5);

void BM_Determinant(benchmark::State& state) {
    auto tree = sandpile::build_tree(3, static_cast<int>(state.range(0)));
    auto lap = sandpile::reduced_laplacian(tree.graph);
    for (auto _ : state) {
        auto det = sandpile::determinant(lap);
        benchmark::DoNotOptimize(det);
    }
}
BENCHMARK(BM_Determinant)->DenseRange(2, 6);

void BM_Stabilize(benchmark::State& state) {
    auto tree = sandpile::build_tree(3, static_cast<int>(state.range(0)));
    const int n = tree.coords.vertex_count();
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<long long> grains(0, 20);
    sandpile::Configuration c(n);
    for (auto& x : c) x = grains(rng);
    for (auto _ : state) {
        auto res = sandpile::stabilize(tree.graph, c);
        benchmark::DoNotOptimize(res.stable);
    }
}
BENCHMARK(BM_Stabilize)->DenseRange(3, 7);

void BM_VerifyAll(benchmark::State& state) {
    for (auto _ : state) {
        auto report = sandpile::verify_tree(3, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_VerifyAll)->DenseRange(1, 3);

}  // namespace

BENCHMARK_MAIN();
