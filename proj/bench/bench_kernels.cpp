#include <benchmark/benchmark.h>

#include <omp.h>

#include <random>

#include "clrcast/copula_sim.hpp"
#include "clrcast/reference.hpp"

using namespace clrcast;

namespace {

PseudoSample make_sample(int n) {
    const auto pts = sample({Family::gumbel, {1.8}, 1}, n);
    std::vector<double> x, y;
    for (const auto& p : pts) {
        x.push_back(p.u);
        y.push_back(p.v);
    }
    return make_pseudo_sample(x, y);
}

std::vector<Point2> random_points(int n) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Point2> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = {U(rng), U(rng)};
    return pts;
}

void BM_BetaKernelParallel(benchmark::State& state) {
    const auto s = make_sample(static_cast<int>(state.range(0)));
    const auto grid = Design::midpoint_grid(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_copula_density(s, 0.05, grid));
    state.counters["threads"] = omp_get_max_threads();
}

void BM_BetaKernelReference(benchmark::State& state) {
    const auto s = make_sample(static_cast<int>(state.range(0)));
    const auto grid = Design::midpoint_grid(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::beta_kernel_density(s, 0.05, grid));
}

void BM_CollocationParallel(benchmark::State& state) {
    const auto basis = TensorBasis::uniform(4, 3);
    const auto pts = random_points(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tensor_collocation(basis, pts));
    state.counters["threads"] = omp_get_max_threads();
}

void BM_CollocationReference(benchmark::State& state) {
    const auto basis = TensorBasis::uniform(4, 3);
    const auto pts = random_points(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::tensor_collocation(basis, pts));
}

}  // namespace

BENCHMARK(BM_BetaKernelParallel)->Args({500, 30})->Args({2000, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetaKernelReference)->Args({500, 30})->Args({2000, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CollocationParallel)->Arg(900)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CollocationReference)->Arg(900)->Arg(10000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
