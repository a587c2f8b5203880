#include <benchmark/benchmark.h>

#include "qsylv/generate.hpp"
#include "qsylv/linalg.hpp"
#include "qsylv/oracle.hpp"
#include "qsylv/rng.hpp"
#include "qsylv/sylvester.hpp"

using namespace qsylv;

namespace {

QuatMatrix square(Index n) {
  Rng rng(static_cast<std::uint64_t>(7 + n));
  return random_matrix(rng, n, n);
}

SylvesterSystem chained(Index k) {
  Rng rng(static_cast<std::uint64_t>(100 + k));
  PlantOptions po;
  po.max_dim = 4;
  return plant_system(rng, k, po).first;
}

}  // namespace

static void BM_pinv(benchmark::State& state) {
  const QuatMatrix a = square(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinv(a));
  }
}
BENCHMARK(BM_pinv)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_rank(benchmark::State& state) {
  const QuatMatrix a = square(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank(a).rank);
  }
}
BENCHMARK(BM_rank)->Arg(8)->Arg(32);

static void BM_check_system(benchmark::State& state) {
  const SylvesterSystem sys = chained(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_system(sys).consistent);
  }
}
BENCHMARK(BM_check_system)->DenseRange(1, 4);

static void BM_solve_system(benchmark::State& state) {
  const SylvesterSystem sys = chained(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_system(sys).residuals);
  }
}
BENCHMARK(BM_solve_system)->DenseRange(1, 4);

static void BM_oracle(benchmark::State& state) {
  const SylvesterSystem sys = chained(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_consistent(realify(sys)).consistent);
  }
}
BENCHMARK(BM_oracle)->DenseRange(1, 4);

BENCHMARK_MAIN();
