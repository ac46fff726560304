// Serial reference vs OpenMP kernels, dense vs Markov covariance, and a small
// end-to-end experiment at several worker counts.

#include <benchmark/benchmark.h>

#include "geogic/covariance.hpp"
#include "geogic/kernels.hpp"
#include "geogic/montecarlo.hpp"
#include "geogic/sites.hpp"

using namespace geogic;

namespace {

const CovParams kTheta{0.5, 0.5, 1.0};

void BM_Assemble1dSerial(benchmark::State& st) {
  const auto s = sites_1d(st.range(0), 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::assemble_exp_1d(kTheta, s.coords));
}

void BM_Assemble1dParallel(benchmark::State& st) {
  const auto s = sites_1d(st.range(0), 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::assemble_exp_1d(kTheta, s.coords));
}

void BM_Assemble2dSerial(benchmark::State& st) {
  const auto s = sites_2d(st.range(0) * st.range(0), 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::assemble_exp_2d(kTheta, s.coords));
}

void BM_Assemble2dParallel(benchmark::State& st) {
  const auto s = sites_2d(st.range(0) * st.range(0), 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::assemble_exp_2d(kTheta, s.coords));
}

void BM_SolveColumnsSerial(benchmark::State& st) {
  const auto s = sites_1d(st.range(0), 0.0);
  const auto cov = cov_matrix_1d(kTheta, s);
  const Eigen::MatrixXd rhs = cov.to_dense();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::solve_columns(cov, rhs));
}

void BM_SolveColumnsParallel(benchmark::State& st) {
  const auto s = sites_1d(st.range(0), 0.0);
  const auto cov = cov_matrix_1d(kTheta, s);
  const Eigen::MatrixXd rhs = cov.to_dense();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::solve_columns(cov, rhs));
}

void BM_FactorDense(benchmark::State& st) {
  const auto s = sites_1d(st.range(0), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(cov_matrix_1d(kTheta, s).log_det());
}

void BM_FactorMarkov(benchmark::State& st) {
  const auto s = sites_1d(st.range(0), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(cov_matrix_1d_markov(kTheta, s).log_det());
}

void BM_Experiment(benchmark::State& st) {
  const auto c = consistency_preset(SweepExample::white_noise, {0.0}, {100, 200}, TauRule::bic(), 8, 7);
  const int jobs = static_cast<int>(st.range(0));
  for (auto _ : st) {
    if (jobs == 0) {
      benchmark::DoNotOptimize(reference::run_experiment_serial(c));
    } else {
      benchmark::DoNotOptimize(run_experiment(c, jobs));
    }
  }
}

}  // namespace

BENCHMARK(BM_Assemble1dSerial)->Arg(500)->Arg(2000);
BENCHMARK(BM_Assemble1dParallel)->Arg(500)->Arg(2000);
BENCHMARK(BM_Assemble2dSerial)->Arg(20)->Arg(40);
BENCHMARK(BM_Assemble2dParallel)->Arg(20)->Arg(40);
BENCHMARK(BM_SolveColumnsSerial)->Arg(200)->Arg(500);
BENCHMARK(BM_SolveColumnsParallel)->Arg(200)->Arg(500);
BENCHMARK(BM_FactorDense)->Arg(200)->Arg(1000);
BENCHMARK(BM_FactorMarkov)->Arg(200)->Arg(1000)->Arg(10000);
// Argument 0 is the serial reference; others are worker counts.
BENCHMARK(BM_Experiment)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
