// Serial reference kernels against their OpenMP counterparts.
//   dexp_bench --benchmark_filter=Dft
// Thread count for the parallel variants follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "dexp/addcomb.hpp"
#include "dexp/expsums.hpp"
#include "dexp/prng.hpp"

using namespace dexp;

namespace {

FpSet random_set(std::uint32_t p, std::size_t size, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<std::uint32_t> xs;
    std::vector<bool> seen(p);
    while (xs.size() < size) {
        const auto x = static_cast<std::uint32_t>(rng.bounded(p));
        if (!seen[x]) {
            seen[x] = true;
            xs.push_back(x);
        }
    }
    return FpSet(p, xs);
}

CountVector dense_counts(std::uint32_t p, std::uint64_t seed = 0) {
    Xoshiro256 rng(p ^ (seed << 32));
    CountVector v(p);
    for (auto& c : v.counts) c = rng.bounded(1000);
    return v;
}

void BM_DftSerial(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const CountVector f = dense_counts(p);
    for (auto _ : st) benchmark::DoNotOptimize(reference::dft_table(f, pm));
}

void BM_DftParallel(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const CountVector f = dense_counts(p);
    for (auto _ : st) benchmark::DoNotOptimize(dft_table(f, pm));
}

void BM_ConvolveSerial(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const CountVector u = dense_counts(p), v = dense_counts(p, 1);
    for (auto _ : st) benchmark::DoNotOptimize(reference::cyclic_convolve(u, v, pm));
}

void BM_ConvolveParallel(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const CountVector u = dense_counts(p), v = dense_counts(p, 1);
    for (auto _ : st) benchmark::DoNotOptimize(cyclic_convolve(u, v, pm));
}

void BM_BiasSerial(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const FpSet a = random_set(p, p / 3, 1);
    for (auto _ : st) benchmark::DoNotOptimize(reference::fourier_magnitudes(a, pm));
}

void BM_BiasParallel(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const FpSet a = random_set(p, p / 3, 1);
    for (auto _ : st) benchmark::DoNotOptimize(fourier_bias(a, pm, true));
}

void BM_KloostermanSerial(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const FpSet b = random_set(p, 8, 2);
    for (auto _ : st) benchmark::DoNotOptimize(reference::kloosterman_moment(b, 2, {}, pm));
}

void BM_KloostermanParallel(benchmark::State& st) {
    const auto p = static_cast<std::uint32_t>(st.range(0));
    const PrimeModulus pm(p);
    const FpSet b = random_set(p, 8, 2);
    for (auto _ : st) benchmark::DoNotOptimize(kloosterman_moment(b, 2, {}, pm));
}

}  // namespace

BENCHMARK(BM_DftSerial)->Arg(499)->Arg(2003)->Arg(8191)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DftParallel)->Arg(499)->Arg(2003)->Arg(8191)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ConvolveSerial)->Arg(499)->Arg(2003)->Arg(8191)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ConvolveParallel)->Arg(499)->Arg(2003)->Arg(8191)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BiasSerial)->Arg(499)->Arg(2003)->Arg(8191)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BiasParallel)->Arg(499)->Arg(2003)->Arg(8191)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KloostermanSerial)->Arg(101)->Arg(499)->Arg(2003)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KloostermanParallel)->Arg(101)->Arg(499)->Arg(2003)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
