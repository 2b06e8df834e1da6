#include <benchmark/benchmark.h>

#include <random>

#include "repsim/kernels.hpp"

using namespace repsim;

namespace {

DataMatrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> v(n * p);
    for (double& x : v) x = normal(rng);
    return DataMatrix(n, p, std::move(v));
}

template <CrossStats (*Kernel)(const DataMatrix&, const DataMatrix&)>
void run(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = static_cast<std::size_t>(state.range(1));
    const auto x = random_matrix(n, p, 1), y = random_matrix(n, p, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y));
    state.counters["n"] = static_cast<double>(n);
    state.counters["p"] = static_cast<double>(p);
}

void feature_args(benchmark::internal::Benchmark* b) {
    b->Args({2000, 64})->Args({8000, 256})->Args({23582, 256})->Unit(benchmark::kMillisecond);
}

void gram_args(benchmark::internal::Benchmark* b) {
    b->Args({500, 64})->Args({2000, 256})->Args({4000, 256})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(run<kernels::feature_space_stats>)->Name("feature/parallel")->Apply(feature_args);
BENCHMARK(run<kernels::serial::feature_space_stats>)->Name("feature/serial")->Apply(feature_args);
BENCHMARK(run<kernels::gram_space_stats>)->Name("gram/parallel")->Apply(gram_args);
BENCHMARK(run<kernels::serial::gram_space_stats>)->Name("gram/serial")->Apply(gram_args);

BENCHMARK_MAIN();
