#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nlh/dynamics.hpp"
#include "nlh/profile.hpp"
#include "nlh/semigroup.hpp"
#include "nlh/spectral.hpp"

using namespace nlh;

namespace {

const ProblemParams& p53() {
    static const ProblemParams pp = derived_exponents(5, 3.0);
    return pp;
}

void BM_ShootProfile(benchmark::State& state) {
    const double alpha = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(shoot_profile(alpha, p53()).ell);
}
BENCHMARK(BM_ShootProfile)->Arg(5)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_TopEigenpair(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(top_eigenpair(2.0, p53()).lambda);
}
BENCHMARK(BM_TopEigenpair)->Unit(benchmark::kMillisecond);

void BM_MatrixSpectrum(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(matrix_spectrum(2.0, p53()));
}
BENCHMARK(BM_MatrixSpectrum)->Unit(benchmark::kMillisecond);

void BM_FindAlphaStar(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(find_alpha_star(p53()).alpha_star);
}
BENCHMARK(BM_FindAlphaStar)->Unit(benchmark::kMillisecond);

void BM_ApplyS0(benchmark::State& state) {
    const RadialGrid grid = RadialGrid::uniform(16.0, 0.04);
    const RadialFunction f = RadialFunction::sample(grid, GaussianDatum{1.0, 0.7});
    for (auto _ : state) benchmark::DoNotOptimize(apply_S0(0.5, f, p53()).values);
}
BENCHMARK(BM_ApplyS0)->Unit(benchmark::kMillisecond);

void BM_ImexStep(benchmark::State& state) {
    const RadialGrid grid = RadialGrid::uniform();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-grid[i] * grid[i]);
    EvolutionState s{0.0, grid, v};
    for (auto _ : state) {
        s = step_imex(s, 0.01, p53());
        benchmark::DoNotOptimize(s.v.data());
    }
}
BENCHMARK(BM_ImexStep)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
