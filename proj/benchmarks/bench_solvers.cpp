#include "oscdelta/full_solution.hpp"
#include "oscdelta/tdse.hpp"
#include "oscdelta/toeplitz.hpp"
#include "oscdelta/well.hpp"

#include <benchmark/benchmark.h>

using namespace oscdelta;

namespace {

BarrierParams make(double E, double omega, double V0, double eps) {
    BarrierParams::Values v;
    v.E = E;
    v.Omega = omega;
    v.V0 = V0;
    v.eps = eps;
    return BarrierParams(v);
}

void BM_SolveFS(benchmark::State& state) {
    const BarrierParams p = make(2.5, 1.0, 10.0, 1.0);
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_fs(p, -N, N));
    state.SetComplexityN(2 * N + 1);
}
BENCHMARK(BM_SolveFS)->RangeMultiplier(4)->Range(4, 1024)->Complexity(benchmark::oN);

void BM_ConvergeTruncation(benchmark::State& state) {
    const BarrierParams p = make(2.5, 1.0, 10.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(converge_truncation(p));
}
BENCHMARK(BM_ConvergeTruncation);

void BM_SolveTS(benchmark::State& state) {
    const BarrierParams p = make(2.5, 1.0, 10.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_ts(p));
}
BENCHMARK(BM_SolveTS);

void BM_EvenSpectrum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(even_spectrum(10.0, 200.0, n));
    state.SetComplexityN(n);
}
BENCHMARK(BM_EvenSpectrum)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oN);

void BM_AdiabaticRhs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const AdiabaticSystem sys(make(5.0, 5.0, 5.0, 0.9), 200.0, n);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(3 * n, 0.1);
    Eigen::VectorXd dydt;
    for (auto _ : state) {
        sys(0.3, y, dydt);
        benchmark::DoNotOptimize(dydt.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_AdiabaticRhs)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNSquared);

} // namespace

BENCHMARK_MAIN();
