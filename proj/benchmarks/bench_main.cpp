#include <benchmark/benchmark.h>

#include <cmath>

#include "quickdetect/info.hpp"
#include "quickdetect/montecarlo.hpp"

using namespace quickdetect;

namespace {

const std::vector<double> kGrid = {-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1,
                                   0.1,  0.2,  0.3,  0.4,  0.5,  0.6,  0.7,  0.8,  0.9};

void BM_WsrStep(benchmark::State& state) {
  ArGaussianModel model(make_theta(0.0));
  const auto grid = ParameterGrid::uniform_scalar(kGrid);
  WsrStatistic stat(grid);
  RandomStream rng(1);
  double prev = 0.0;
  for (auto _ : state) {
    const double x = rng.gaussian();
    benchmark::DoNotOptimize(stat.update(model, {&x, 1}, {&prev, 1}));
    prev = x;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WsrStep);

void BM_SrStep(benchmark::State& state) {
  ArGaussianModel model(make_theta(0.0));
  SrStatistic stat(make_theta(0.9));
  RandomStream rng(2);
  double prev = 0.0;
  for (auto _ : state) {
    const double x = rng.gaussian();
    benchmark::DoNotOptimize(stat.update(model, {&x, 1}, {&prev, 1}));
    prev = x;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SrStep);

void BM_LyapunovDoubling(benchmark::State& state) {
  const auto p = static_cast<Eigen::Index>(state.range(0));
  Matrix a = Matrix::Random(p, p);
  a *= 0.95 / spectral_radius(a);
  const Matrix b = Matrix::Identity(p, p);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov_doubling(a, b).solution.data());
}
BENCHMARK(BM_LyapunovDoubling)->Arg(2)->Arg(8)->Arg(32);

void BM_EstimateAdd(benchmark::State& state) {
  ArGaussianModel model(make_theta(0.0));
  const auto rule = StoppingRule::wsr(ParameterGrid::uniform_scalar(kGrid), std::log(395.0));
  MonteCarloConfig cfg;
  cfg.replications = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_add(rule, model, make_theta(0.9), 0, cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateAdd)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
