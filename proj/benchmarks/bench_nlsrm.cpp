#include <benchmark/benchmark.h>

#include <complex>

#include "nlsrm/decomposition.hpp"
#include "nlsrm/matrixgen.hpp"
#include "nlsrm/nonlinearity.hpp"
#include "nlsrm/sbm.hpp"
#include "nlsrm/spectral.hpp"
#include "nlsrm/theory.hpp"

using namespace nlsrm;

namespace {

const Distribution kStd = Distribution::gaussian(0.0, 1.0);

void BM_SampleWigner(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_wigner(n, kStd, ++seed));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * (n + 1) / 2));
}
BENCHMARK(BM_SampleWigner)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_AssembleObservation(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix w = sample_wigner(n, kStd, 1);
    const auto x = rademacher_signal(n, 2);
    const auto f = NonlinearFn::hermite_combination({0, 0, 1, 1});
    for (auto _ : state) benchmark::DoNotOptimize(assemble_observation(w, f, SpikeParams(2.0, 1.0 / 3.0, n), x));
}
BENCHMARK(BM_AssembleObservation)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_EigTop(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix y = sample_wigner(n, kStd, 3) / std::sqrt(static_cast<double>(n));
    for (auto _ : state) benchmark::DoNotOptimize(sym_eig_top(y, state.range(1)));
}
BENCHMARK(BM_EigTop)->Args({500, 2})->Args({1000, 2})->Args({2000, 2})->Args({2000, 4})->Unit(benchmark::kMillisecond);

void BM_Eigenvalues(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix y = sample_wigner(n, kStd, 4) / std::sqrt(static_cast<double>(n));
    for (auto _ : state) benchmark::DoNotOptimize(sym_eigenvalues(y));
}
BENCHMARK(BM_Eigenvalues)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SolveQve(benchmark::State& state) {
    const double eta = std::pow(10.0, -static_cast<double>(state.range(0)));
    double tau = -2.0;
    for (auto _ : state) {
        tau = tau > 2.0 ? -2.0 : tau + 0.01;
        benchmark::DoNotOptimize(solve_qve_two_block(1.0 / 3.0, 1.0, 0.6, {tau, eta}));
    }
}
BENCHMARK(BM_SolveQve)->Arg(1)->Arg(3)->Arg(6);

void BM_QveDensity(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i) grid.push_back(-2.5 + 5.0 * (i + 0.5) / 200);
    for (auto _ : state) benchmark::DoNotOptimize(spectral_density_from_qve(1.0 / 3.0, 1.0, 0.6, grid));
}
BENCHMARK(BM_QveDensity)->Unit(benchmark::kMillisecond);

void BM_MomentTable(benchmark::State& state) {
    const auto f = NonlinearFn::hermite_combination({0, 0, 2.25, 1, 1});
    MomentOptions opt;
    opt.force_monte_carlo = state.range(0) != 0;
    opt.mc_samples = 100'000;
    for (auto _ : state) benchmark::DoNotOptimize(moment_table(f, kStd, 6, opt));
}
BENCHMARK(BM_MomentTable)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_TanhExpectation(benchmark::State& state) {
    const auto f = derivative(NonlinearFn::named(NamedTag::tanh), 3);
    for (auto _ : state) benchmark::DoNotOptimize(expectation(f, Distribution::gaussian(0.3, 1.2)));
}
BENCHMARK(BM_TanhExpectation)->Unit(benchmark::kMicrosecond);

void BM_Decomposition(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix w = sample_wigner(n, kStd, 5);
    const auto x = rademacher_signal(n, 6);
    const auto f = NonlinearFn::hermite_combination({0, 0, 1, 1});
    for (auto _ : state) benchmark::DoNotOptimize(signal_plus_noise(w, f, SpikeParams(1.0, 0.25, n), x, WignerEnsemble{kStd}));
}
BENCHMARK(BM_Decomposition)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SbmTrial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto f = NonlinearFn::hermite_combination({0, 0, 2.25, 1, 1});
    const auto spec = sbm_with_gap(n, 0.5, kStd, kStd, 2.0 * 3.0 * std::pow(static_cast<double>(n), -1.0 / 6.0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_sbm_trial(spec, f, ++seed, 2));
}
BENCHMARK(BM_SbmTrial)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
