#include <benchmark/benchmark.h>

#include "chainforge/ekeland.hpp"
#include "chainforge/filling.hpp"
#include "chainforge/metric.hpp"
#include "chainforge/systolic.hpp"

using namespace chainforge;

namespace {

FiniteMetricSpace circle(std::size_t n) {
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t k = i > j ? i - j : j - i;
      d[i][j] = Rational(static_cast<long>(std::min(k, n - k)));
    }
  return FiniteMetricSpace(d);
}

Chain circle_cycle(const ComplexPtr& cx, std::size_t n) {
  Chain l(cx, 1, 2);
  for (std::size_t i = 0; i < n; ++i) {
    Simplex e{static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n)};
    std::sort(e.begin(), e.end());
    l.add_term(cx->index_of(e), 1);
  }
  return l;
}

ComplexPtr circle_rips(std::size_t n) { return build_rips(circle(n), Rational(static_cast<long>(n / 2)), 2); }

void BM_RipsSerial(benchmark::State& s) {
  auto space = circle(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(build_rips_serial(space, space.diameter() / 2, 2));
}
void BM_RipsParallel(benchmark::State& s) {
  auto space = circle(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(build_rips(space, space.diameter() / 2, 2));
}

void BM_SystoleSerial(benchmark::State& s) {
  ClosedManifoldComplex m(square_torus(static_cast<std::size_t>(s.range(0))));
  for (auto _ : s) benchmark::DoNotOptimize(systole_serial(m));
}
void BM_SystoleParallel(benchmark::State& s) {
  ClosedManifoldComplex m(square_torus(static_cast<std::size_t>(s.range(0))));
  for (auto _ : s) benchmark::DoNotOptimize(systole(m));
}

void BM_FillradSerial(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  auto cx = circle_rips(n);
  auto l = circle_cycle(cx, n);
  for (auto _ : s) benchmark::DoNotOptimize(filling_radius_serial(l));
}
void BM_FillradParallel(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  auto cx = circle_rips(n);
  auto l = circle_cycle(cx, n);
  for (auto _ : s) benchmark::DoNotOptimize(filling_radius(l));
}

void ekeland_bench(benchmark::State& s, bool serial) {
  const auto n = static_cast<std::size_t>(s.range(0));
  auto cx = circle_rips(n);
  auto l = circle_cycle(cx, n);
  auto seed = cone_fill(l, 0, 2).T;
  EkelandOptions o;
  o.restarts = 8;
  for (auto _ : s) benchmark::DoNotOptimize(serial ? quasi_minimize_serial(l, seed, 2, o) : quasi_minimize(l, seed, 2, o));
}
void BM_EkelandSerial(benchmark::State& s) { ekeland_bench(s, true); }
void BM_EkelandParallel(benchmark::State& s) { ekeland_bench(s, false); }

}  // namespace

BENCHMARK(BM_RipsSerial)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RipsParallel)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SystoleSerial)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SystoleParallel)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FillradSerial)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FillradParallel)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EkelandSerial)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EkelandParallel)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
