#include <benchmark/benchmark.h>

#include <vector>

#include "funcrate/estimate.hpp"
#include "funcrate/model.hpp"
#include "funcrate/rng.hpp"
#include "funcrate/simulate.hpp"
#include "funcrate/stable_density.hpp"

using namespace funcrate;

static void BM_Normal(benchmark::State& state) {
    RandomStream s({1, 0, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.normal());
    }
}
BENCHMARK(BM_Normal);

static void BM_StableCMS(benchmark::State& state) {
    RandomStream s({1, 0, 0});
    const StableSampler sampler(static_cast<double>(state.range(0)) / 100.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler(s));
    }
}
BENCHMARK(BM_StableCMS)->Arg(50)->Arg(100)->Arg(150)->Arg(195);

static void BM_PathAndCoupledErrors(benchmark::State& state) {
    const bool stable = state.range(0) != 0;
    const auto model = stable ? ProcessModel::stable(1.5, 1.0) : ProcessModel::brownian(1.0);
    const GridSpec grid(1.0, 1 << 15, {8, 16, 32, 64, 128, 256, 512});
    const auto h = HolderFunction::power_abs(0.5);
    const PathBatch batch(model, grid, 1u << 30, 1);
    std::vector<double> path(batch.path_length());
    std::size_t i = 0;
    for (auto _ : state) {
        batch.generate(i++, path);
        benchmark::DoNotOptimize(coupled_errors(path, grid, h));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(grid.n_ref()));
}
BENCHMARK(BM_PathAndCoupledErrors)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_StableDensity(benchmark::State& state) {
    const auto& g = StableDensity::standard(1.5);
    double u = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.time_derivative(u, 1));
        u = u > 20.0 ? 0.0 : u + 0.37;
    }
}
BENCHMARK(BM_StableDensity);

static void BM_CertificateStable(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(certificate_for(ProcessModel::stable(1.5, 1.0), 1.0));
    }
}
BENCHMARK(BM_CertificateStable)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
