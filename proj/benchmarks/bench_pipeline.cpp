#include "ltsa/align.hpp"
#include "ltsa/analysis.hpp"
#include "ltsa/dataset.hpp"
#include "ltsa/neighbors.hpp"
#include "ltsa/tangent.hpp"

#include <benchmark/benchmark.h>

using namespace ltsa;

namespace {

DataMatrix peak_data(Index n) {
    static auto cache = gen_peak_surface(5000, 1.0, 1).first;
    return DataMatrix(cache.values.leftCols(n).eval());
}

void BM_knn_bruteforce(benchmark::State& state) {
    const DataMatrix data = peak_data(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(knn_bruteforce(data, 15));
}
BENCHMARK(BM_knn_bruteforce)->Arg(1000)->Arg(3000);

void BM_knn_tree(benchmark::State& state) {
    const DataMatrix data = peak_data(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(knn_tree(data, 15));
}
BENCHMARK(BM_knn_tree)->Arg(1000)->Arg(3000)->Arg(5000);

void BM_frames(benchmark::State& state) {
    const DataMatrix data = peak_data(state.range(0));
    const auto nbrs = knn_tree(data, 15);
    for (auto _ : state) benchmark::DoNotOptimize(all_frames(data, nbrs, 2));
}
BENCHMARK(BM_frames)->Arg(1000)->Arg(5000);

void BM_operator_apply(benchmark::State& state) {
    const DataMatrix data = peak_data(state.range(0));
    const auto nbrs = knn_tree(data, 15);
    const auto frames = all_frames(data, nbrs, 2);
    const auto op = build_operator(frames, nbrs, data.N());
    const Vector v = Vector::LinSpaced(data.N(), -1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(v));
}
BENCHMARK(BM_operator_apply)->Arg(1000)->Arg(5000);

void BM_ltsa_small(benchmark::State& state) {
    const auto data = gen_curve("spiral", state.range(0), 0.1, 1).first;
    for (auto _ : state) benchmark::DoNotOptimize(ltsa_embed(data, 8, 1));
}
BENCHMARK(BM_ltsa_small)->Arg(200)->Arg(400)->Arg(800);

void BM_lle_small(benchmark::State& state) {
    const auto data = gen_curve("spiral", state.range(0), 0.1, 1).first;
    for (auto _ : state) benchmark::DoNotOptimize(lle_embed(data, 8, 1));
}
BENCHMARK(BM_lle_small)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
