#include <benchmark/benchmark.h>

#include <cmath>

#include "qpr/overlap.hpp"
#include "qpr/spectra.hpp"

namespace {

const qpr::TimePoint kUnit{0.0, 1.0, 1.0, 1.0};

qpr::GammaValue squeezed_gamma(double g) {
    const double s = 4.0 * g - 2.0;
    const double y = 0.5 * (s + std::sqrt(s * s - 4.0));
    return qpr::gamma_squeezed({std::sqrt(y), 0.0}, kUnit);
}

void BM_ProbDisplaced(benchmark::State& state) {
    const qpr::GammaValue g{30.0, qpr::Regime::displaced, 30.0, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(qpr::prob_displaced(5, 50, g));
}
BENCHMARK(BM_ProbDisplaced);

void BM_ProbSqueezed(benchmark::State& state) {
    const qpr::GammaValue g = squeezed_gamma(30.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(qpr::prob_squeezed(6, 50, g));
}
BENCHMARK(BM_ProbSqueezed);

void BM_BuildDistributionDisplaced(benchmark::State& state) {
    const double gv = static_cast<double>(state.range(0));
    const qpr::GammaValue g{gv, qpr::Regime::displaced, gv, 1.0};
    for (auto _ : state) {
        const qpr::EnergyDistribution d = qpr::build_distribution(3, g);
        benchmark::DoNotOptimize(d.n_max);
    }
}
BENCHMARK(BM_BuildDistributionDisplaced)->Arg(10)->Arg(100)->Arg(1000);

void BM_BuildDistributionSqueezed(benchmark::State& state) {
    const qpr::GammaValue g = squeezed_gamma(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        const qpr::EnergyDistribution d = qpr::build_distribution(3, g);
        benchmark::DoNotOptimize(d.n_max);
    }
}
BENCHMARK(BM_BuildDistributionSqueezed)->Arg(10)->Arg(100)->Arg(1000);

void BM_OverlapQuadrature(benchmark::State& state) {
    qpr::WaveParams wf;
    wf.rho = 2.0;
    wf.rho_dot = 0.7;
    for (auto _ : state)
        benchmark::DoNotOptimize(qpr::overlap_probability(10, 12, wf));
}
BENCHMARK(BM_OverlapQuadrature);

} // namespace

BENCHMARK_MAIN();
