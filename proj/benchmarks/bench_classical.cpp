#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qpr/classical.hpp"
#include "qpr/drive_profile.hpp"

namespace {

qpr::DriveProfile square(double x, double delta, double gamma, int n_periods) {
    const double tau = x;
    return qpr::DriveProfile::make(
        1.0, tau, n_periods,
        {{0.5 * tau, delta, gamma}, {0.5 * tau, -delta, gamma}});
}

void BM_Monodromy(benchmark::State& state) {
    const qpr::DriveProfile p = square(3.18, 0.3, 0.01, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(qpr::monodromy(p).growth_exponent);
}
BENCHMARK(BM_Monodromy);

void BM_PropagateLinear100Periods(benchmark::State& state) {
    const qpr::DriveProfile p = square(3.18, 0.3, 0.01, 100);
    std::vector<double> ts;
    for (int i = 1; i <= 100; ++i) ts.push_back(p.total_time() * i / 100.0);
    for (auto _ : state) {
        const qpr::Trajectory t = qpr::propagate_linear(p, {1e-6, 0.0}, ts);
        benchmark::DoNotOptimize(t.samples.back().state.value);
    }
}
BENCHMARK(BM_PropagateLinear100Periods);

void BM_ErmakovPinney100Periods(benchmark::State& state) {
    const qpr::DriveProfile p = square(3.18, 0.3, 0.01, 100);
    std::vector<double> ts;
    for (int i = 1; i <= 100; ++i) ts.push_back(p.total_time() * i / 100.0);
    const double rho0 = 1.0 / std::sqrt(qpr::frequencies_at(p, 0.0).omega_tilde);
    for (auto _ : state) {
        const qpr::Trajectory t = qpr::propagate_ermakov(p, {rho0 + 1e-6, 0.0}, ts);
        benchmark::DoNotOptimize(t.samples.back().state.value);
    }
}
BENCHMARK(BM_ErmakovPinney100Periods);

void BM_BandScan(benchmark::State& state) {
    const qpr::DriveProfile shape = square(3.0, 0.3, 0.02, 1);
    const int points = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const qpr::BandScan scan = qpr::scan_bands(shape, 0.5, 20.0, points);
        benchmark::DoNotOptimize(scan.bands.size());
    }
}
BENCHMARK(BM_BandScan)->Arg(200)->Arg(2000);

} // namespace

BENCHMARK_MAIN();
