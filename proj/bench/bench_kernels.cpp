// Serial vs OpenMP timings of the hot kernels, plus pruned vs full FFTs.
// Run with OMP_NUM_THREADS / PHI4_THREADS to vary the team size.

#include <benchmark/benchmark.h>

#include <random>

#include "fft.hpp"
#include "phi4/kernels.hpp"
#include "phi4/littlewood_paley.hpp"
#include "phi4/renormalization.hpp"

using namespace phi4;

namespace {

kernels::Exec exec_of(const benchmark::State& s) {
  return s.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
}

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

FourierField random_field(const TorusGrid& grid, int band) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  FourierField f(grid);
  for (int k1 = 0; k1 <= band; ++k1)
    for (int k2 = -band; k2 <= band; ++k2)
      for (int k3 = -band; k3 <= band; ++k3) f.set({k1, k2, k3}, {g(rng), g(rng)});
  return f;
}

constexpr std::size_t n135 = 135 * 135 * 135;

void BM_multiply_accumulate(benchmark::State& s) {
  auto a = random_vector(n135), b = random_vector(n135), acc = random_vector(n135);
  for (auto _ : s) {
    kernels::multiply_accumulate(acc, a, b, exec_of(s));
    benchmark::DoNotOptimize(acc.data());
  }
}
BENCHMARK(BM_multiply_accumulate)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_sum_abs_pow(benchmark::State& s) {
  auto v = random_vector(n135);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::sum_abs_pow(v, 4.0 / 3.0, exec_of(s)));
}
BENCHMARK(BM_sum_abs_pow)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_max_abs(benchmark::State& s) {
  auto v = random_vector(n135);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::max_abs(v, exec_of(s)));
}
BENCHMARK(BM_max_abs)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_bony_parts(benchmark::State& s) {
  const TorusGrid g = default_grid(2);
  const BlockDecomposition f(random_field(g, g.K)), h(random_field(g, g.K));
  for (auto _ : s) benchmark::DoNotOptimize(bony_parts(f, h, exec_of(s)));
}
BENCHMARK(BM_bony_parts)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_inverse_fft(benchmark::State& s) {
  const int M = 135, K = 32;
  auto& plan = detail::plan_for(M);
  for (auto _ : s) {
    s.PauseTiming();
    auto spec = plan.spectral();
    std::fill(spec.begin(), spec.end(), std::complex<double>{});
    spec[1] = 1.0;
    s.ResumeTiming();
    if (s.range(0)) {
      plan.inverse_band(K);
    } else {
      plan.inverse();
    }
  }
}
BENCHMARK(BM_inverse_fft)->Arg(0)->Arg(1)->ArgName("pruned")->Unit(benchmark::kMillisecond);

void BM_compute_C2(benchmark::State& s) {
  const int N = static_cast<int>(s.range(0));
  for (auto _ : s) benchmark::DoNotOptimize(compute_C2(N, 1.0));
}
BENCHMARK(BM_compute_C2)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
