#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "quickdetect/errors.hpp"
#include "quickdetect/montecarlo.hpp"
#include "quickdetect/statistics.hpp"

using namespace quickdetect;

namespace {

const std::vector<double> kTable1Grid = {-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1,
                                         0.1,  0.2,  0.3,  0.4,  0.5,  0.6,  0.7,  0.8,  0.9};

}  // namespace

TEST(SrUpdate, EmptySumStart) { EXPECT_EQ(sr_update(kLogZero, 0.0), 0.0); }

TEST(SrUpdate, HandValue) { EXPECT_NEAR(sr_update(std::log(3.0), std::log(2.0)), std::log(8.0), 1e-15); }

TEST(SrUpdate, ZeroIncrementsCountSteps) {
  double log_r = kLogZero;
  for (int n = 1; n <= 100; ++n) {
    log_r = sr_update(log_r, 0.0);
    EXPECT_NEAR(std::exp(log_r), n, 1e-12 * n);
  }
}

TEST(SrUpdate, StableForLargeStatistics) {
  EXPECT_DOUBLE_EQ(sr_update(1000.0, 2.0), 1002.0);
  EXPECT_TRUE(std::isfinite(sr_update(1e6, 1.0)));
  EXPECT_NEAR(sr_update(-50.0, 0.0), std::exp(-50.0), 1e-30);
}

TEST(WsrMix, SingletonIsIdentity) {
  const std::vector<double> w = {1.0};
  for (double v : {-3.7, 0.0, 12.25}) EXPECT_EQ(wsr_mix(std::vector<double>{v}, w), v);
}

TEST(WsrMix, SymmetricPair) {
  const double l4 = std::log(4.0);
  EXPECT_NEAR(wsr_mix(std::vector<double>{l4, l4}, std::vector<double>{0.5, 0.5}), l4, 1e-15);
}

TEST(WsrMix, ArithmeticSeries) {
  std::vector<double> log_r(18), w(18, 1.0 / 18.0);
  for (int j = 0; j < 18; ++j) log_r[j] = std::log(j + 1.0);
  EXPECT_NEAR(wsr_mix(log_r, w), std::log(9.5), 1e-14);
}

TEST(WsrMix, AllZeroAndMismatch) {
  EXPECT_EQ(wsr_mix(std::vector<double>{kLogZero, kLogZero}, std::vector<double>{0.5, 0.5}), kLogZero);
  EXPECT_THROW(wsr_mix(std::vector<double>{0.0}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST(WsrMix, LogSumExpBounds) {
  RandomStream rng(5);
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> log_r(4);
    double lo = kLogZero;
    for (int j = 0; j < 4; ++j) {
      log_r[j] = 50.0 * rng.gaussian();
      lo = std::max(lo, std::log(w[j]) + log_r[j]);
    }
    const double v = wsr_mix(log_r, w);
    EXPECT_GE(v, lo - 1e-12);
    EXPECT_LE(v, lo + std::log(4.0) + 1e-12);
  }
}

TEST(ParameterGrid, Validation) {
  EXPECT_THROW(ParameterGrid({}, {}), ParameterError);
  EXPECT_THROW(ParameterGrid({make_theta(0.1), make_theta(0.2)}, {0.5}), ParameterError);
  EXPECT_THROW(ParameterGrid({make_theta(0.1), make_theta(0.2)}, {1.0, 0.0}), ParameterError);
  EXPECT_THROW(ParameterGrid({make_theta(0.1), make_theta(0.2)}, {0.5, 0.6}), ParameterError);
  const auto g = ParameterGrid::uniform_scalar(kTable1Grid);
  EXPECT_EQ(g.size(), 18u);
  EXPECT_NEAR(std::accumulate(g.weights().begin(), g.weights().end(), 0.0), 1.0, 1e-12);
  for (double w : g.weights()) EXPECT_NEAR(w, 1.0 / 18.0, 1e-15);
}

TEST(ParameterGrid, ExcludesPreChangePoint) {
  ArGaussianModel m(make_theta(0.0));
  const auto bad = ParameterGrid::uniform_scalar({-0.5, 0.0, 0.5});
  try {
    bad.validate_against(m);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("grid point 2"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(ParameterGrid::uniform_scalar(kTable1Grid).validate_against(m));
}

TEST(Step, FirstStepFromZeroStateGivesZero) {
  ArGaussianModel m(make_theta(0.0));
  const auto grid = ParameterGrid::uniform_scalar(kTable1Grid);
  const DetectorState s0 = initial_detector_state(grid);
  EXPECT_EQ(s0.n, 0u);
  EXPECT_EQ(s0.log_wsr, kLogZero);
  for (double v : s0.log_r) EXPECT_EQ(v, kLogZero);
  const double x = 1.7, prev = 0.0;
  const DetectorState s1 = step(s0, m, grid, {&x, 1}, {&prev, 1});
  EXPECT_EQ(s1.n, 1u);
  for (double v : s1.log_r) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(s1.log_wsr, 0.0, 1e-15);
}

TEST(Step, MatchesDirectDoubleSumOnTable1Grid) {
  ArGaussianModel m(make_theta(0.0));
  const auto grid = ParameterGrid::uniform_scalar(kTable1Grid);
  const Vector theta = make_theta(0.6);
  PathSampler source(m, 0, &theta, 404);
  std::vector<double> xs = {0.0};
  DetectorState s = initial_detector_state(grid);
  for (int n = 1; n <= 3; ++n) {
    const double prev = source.state()[0];
    const double x = source.advance()[0];
    xs.push_back(x);
    s = step(std::move(s), m, grid, {&x, 1}, {&prev, 1});
    const long double direct = oracle::wsr_double_sum(xs, kTable1Grid, grid.weights());
    EXPECT_NEAR(std::exp(s.log_wsr), static_cast<double>(direct), 1e-10 * static_cast<double>(direct));
  }
}

TEST(Step, RecursionMatchesDefinitionOnRandomPaths) {
  ArGaussianModel m(make_theta(0.0));
  const std::vector<double> points = {-0.7, -0.2, 0.3, 0.8};
  const std::vector<double> weights = {0.1, 0.2, 0.3, 0.4};
  ParameterGrid grid({make_theta(-0.7), make_theta(-0.2), make_theta(0.3), make_theta(0.8)}, weights);
  for (std::uint64_t r = 0; r < 100; ++r) {
    const Vector theta = make_theta(0.5);
    PathSampler source(m, r % 7, &theta, replication_seed(17, r));
    WsrStatistic stat(grid);
    std::vector<double> xs = {0.0};
    for (int n = 1; n <= 20; ++n) {
      const double prev = source.state()[0];
      const double x = source.advance()[0];
      xs.push_back(x);
      const double log_wsr = stat.update(m, {&x, 1}, {&prev, 1});
      const long double direct = oracle::wsr_double_sum(xs, points, weights);
      const double rel = std::abs(std::exp(static_cast<long double>(log_wsr)) / direct - 1.0L);
      EXPECT_LT(rel, 1e-10) << "replication " << r << " n " << n;
      EXPECT_NEAR(log_mix(stat.state().log_r, grid.log_weights()), stat.log_value(), 1e-10);
    }
  }
}

TEST(WsrStatistic, NoOverflowOverLongPostChangeRun) {
  ArGaussianModel m(make_theta(0.0));
  const auto grid = ParameterGrid::uniform_scalar(kTable1Grid);
  const Vector theta = make_theta(0.9);
  PathSampler source(m, 0, &theta, 8);
  WsrStatistic stat(grid);
  double prev = 0.0;
  for (int n = 0; n < 1000000; ++n) {
    prev = source.state()[0];
    const double x = source.advance()[0];
    stat.update(m, {&x, 1}, {&prev, 1});
  }
  EXPECT_TRUE(std::isfinite(stat.log_value()));
  EXPECT_GT(stat.log_value(), 1e5);
  for (double v : stat.state().log_r) EXPECT_TRUE(std::isfinite(v));
}

TEST(WsrStatistic, ResetReturnsToZeroState) {
  ArGaussianModel m(make_theta(0.0));
  const auto grid = ParameterGrid::uniform_scalar({0.5, 0.9});
  WsrStatistic stat(grid);
  const double x = 1.0, prev = 0.5;
  stat.update(m, {&x, 1}, {&prev, 1});
  stat.reset();
  EXPECT_EQ(stat.log_value(), kLogZero);
  EXPECT_EQ(stat.state().n, 0u);
}

TEST(WsrStatistic, MeanUnderNoChangeAtTen) {
  ArGaussianModel m(make_theta(0.0));
  const auto grid = ParameterGrid::uniform_scalar({-0.25, -0.15, -0.05, 0.05, 0.15, 0.25});
  MonteCarloConfig cfg;
  cfg.replications = 100000;
  cfg.seed = 3;
  const auto est = statistic_mean_profile(grid, m, {10}, cfg);
  EXPECT_NEAR(est[0].mean, 10.0, 3 * est[0].std_error);
}
