#include "robsub/oracle.hpp"
#include "robsub/pipeline.hpp"
#include "robsub/regression.hpp"
#include "robsub/rng.hpp"
#include "robsub/sketch.hpp"
#include "robsub/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace robsub;

namespace {

// Arg: density in per mille.
void BM_ApplyRight(benchmark::State& state) {
  const Matrix a(random_sparse(20000, 400, state.range(0) / 1000.0, 1));
  const auto s = make_sparse_sketch(2, 360, 400, 4);
  for (auto _ : state) benchmark::DoNotOptimize(apply_right(a, s));
  state.counters["nnz"] = static_cast<double>(a.nnz());
}
BENCHMARK(BM_ApplyRight)->Arg(20)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_GaussianRowNorms(benchmark::State& state) {
  const Matrix a(random_sparse(20000, 400, 0.05, 3));
  const auto g = make_gaussian_sketch(4, 400, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_row_norm_estimates(a, nullptr, g));
}
BENCHMARK(BM_GaussianRowNorms)->Arg(1)->Arg(30)->Unit(benchmark::kMillisecond);

PlantedData planted(Index n) {
  PlantedOptions po;
  po.n = n;
  po.d = 40;
  po.k = 4;
  po.noise = 0.05;
  po.outlier_fraction = 0.01;
  po.seed = 5;
  return planted_low_rank(po);
}

void BM_ApproxLp(benchmark::State& state) {
  const Matrix a(planted(state.range(0)).a);
  for (auto _ : state) benchmark::DoNotOptimize(approx_lp(a, 4, 0.25, LossSpec::lp(1.0), 6));
}
BENCHMARK(BM_ApproxLp)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ApproxHuber(benchmark::State& state) {
  const Matrix a(planted(state.range(0)).a);
  for (auto _ : state) benchmark::DoNotOptimize(approx_m2(a, 4, 0.25, LossSpec::huber(1.0), 7));
}
BENCHMARK(BM_ApproxHuber)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SvdBaseline(benchmark::State& state) {
  const Matrix a(planted(state.range(0)).a);
  for (auto _ : state) benchmark::DoNotOptimize(svd_truncation_cost(a, 4, LossSpec::lp(1.0)));
}
BENCHMARK(BM_SvdBaseline)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_HuberRegression(benchmark::State& state) {
  Rng rng(8);
  const DenseMatrix x = gaussian_matrix(10000, 20, 1.0, rng);
  const Vector b = x * Vector::Ones(20) + gaussian_matrix(10000, 1, 1.0, rng).col(0);
  RegressionConfig cfg;
  cfg.c_size = 0.002;
  cfg.base_cap = 500;
  for (auto _ : state) benchmark::DoNotOptimize(m_regress(Matrix(x), b, LossSpec::huber(1.0), 0.1, 9, cfg));
}
BENCHMARK(BM_HuberRegression)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
