#include <random>

#include <benchmark/benchmark.h>

#include "cocylab/lyapunov.hpp"
#include "cocylab/semicontinuity.hpp"

using namespace cocylab;

namespace {

Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = u(rng);
  return m;
}

Cocycle random_cocycle(std::size_t n, int d) {
  std::mt19937_64 rng(n * 31 + static_cast<std::size_t>(d));
  std::vector<Matrix> gens;
  for (std::size_t i = 0; i < n; ++i) gens.push_back(Matrix::Identity(d, d) + 0.3 * random_matrix(d, rng));
  return Cocycle(std::make_shared<const FiniteBase>(FiniteBase::cyclic(n)), gens);
}

}  // namespace

static void BM_ExteriorPower(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const Matrix m = random_matrix(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exterior_power(m, d / 2));
}
BENCHMARK(BM_ExteriorPower)->DenseRange(2, 8, 2);

static void BM_ExactSpectrum(benchmark::State& state) {
  const Cocycle a = random_cocycle(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(exact_spectrum_periodic(a));
}
BENCHMARK(BM_ExactSpectrum)->Arg(10)->Arg(100)->Arg(1000);

static void BM_LambdaSequence(benchmark::State& state) {
  const Cocycle a = random_cocycle(50, 4);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_k_sequence(a, 2, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_LambdaSequence)->Arg(16)->Arg(64);

static void BM_QrEstimate(benchmark::State& state) {
  const Cocycle a = random_cocycle(20, 4);
  for (auto _ : state) benchmark::DoNotOptimize(qr_spectrum_estimate(a, 0, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_QrEstimate)->Arg(1000)->Arg(10000);

static void BM_Certificate(benchmark::State& state) {
  const Cocycle a = random_cocycle(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(semicontinuity_modulus(a, 1, 0.1));
}
BENCHMARK(BM_Certificate)->Arg(10)->Arg(100);

static void BM_Collapse(benchmark::State& state) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 2;
  m(1, 1) = 0.5;
  const Cocycle a =
      Cocycle::constant(std::make_shared<const FiniteBase>(FiniteBase::cyclic(static_cast<std::size_t>(state.range(0)))), m);
  for (auto _ : state) benchmark::DoNotOptimize(collapse_perturbation(a, 1.0));
}
BENCHMARK(BM_Collapse)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
