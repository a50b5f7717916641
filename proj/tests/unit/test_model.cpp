#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "quickdetect/errors.hpp"
#include "quickdetect/info.hpp"
#include "quickdetect/model.hpp"
#include "quickdetect/parallel.hpp"

using namespace quickdetect;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

MvLinearModel bivariate_model(double q1_scale = 0.01) {
  Matrix a0(2, 2), q0(2, 2);
  a0 << 0.5, 0.1, 0.0, 0.4;
  q0 << 1.0, 0.2, 0.2, 1.0;
  Matrix q1 = Matrix::Identity(4, 4) * q1_scale;
  q1(0, 3) = q1(3, 0) = 0.3 * q1_scale;
  return MvLinearModel(a0, q0, q1);
}

}  // namespace

TEST(History, PushKeepsNewestFirst) {
  History h(3, 1);
  for (double x : {1.0, 2.0, 3.0, 4.0}) h.push(std::vector<double>{x});
  EXPECT_EQ(std::vector<double>(h.state().begin(), h.state().end()), (std::vector<double>{4.0, 3.0, 2.0}));
  EXPECT_THROW(h.assign(std::vector<double>{1.0}), StateError);
}

TEST(ArModel, Ar1LlrHandValue) {
  ArGaussianModel m(vec({0.0}));
  const double x_new = 1.0, x_prev = 2.0;
  EXPECT_DOUBLE_EQ(llr_increment(m, make_theta(0.5), {&x_new, 1}, {&x_prev, 1}), 0.5);
}

TEST(ArModel, Ar2LlrHandValue) {
  ArGaussianModel m(vec({0.0, 0.0}));
  const double y = 1.0;
  const std::vector<double> x = {1.0, -1.0};
  EXPECT_NEAR(llr_increment(m, vec({0.5, 0.2}), {&y, 1}, x), 0.255, 1e-15);
}

TEST(ArModel, LlrAtPreChangeParameterIsExactlyZero) {
  ArGaussianModel m(vec({0.3, -0.2}));
  RandomStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double y = 10 * rng.gaussian();
    const std::vector<double> x = {10 * rng.gaussian(), 10 * rng.gaussian()};
    EXPECT_EQ(m.llr(m.pre_params(), {&y, 1}, x), 0.0);
  }
}

TEST(ArModel, ShortHistoryIsStateError) {
  ArGaussianModel m(vec({0.3, -0.2}));
  const double y = 1.0, x = 1.0;
  EXPECT_THROW(llr_increment(m, vec({0.1, 0.1}), {&y, 1}, {&x, 1}), StateError);
  EXPECT_THROW(llr_increment(m, vec({0.1}), {&y, 1}, std::vector<double>{1, 2}), ParameterError);
}

TEST(ArModel, RejectsNonStationaryCoefficients) {
  try {
    ArGaussianModel m(vec({1.02}));
    FAIL() << "expected InstabilityError";
  } catch (const InstabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("AR spectral radius 1.02 >= 1"), std::string::npos) << e.what();
  }
  ArGaussianModel ok(vec({0.0}));
  EXPECT_THROW(ok.check_admissible(make_theta(0.0)), ParameterError);
  EXPECT_THROW(ok.check_admissible(make_theta(-1.0)), InstabilityError);
  EXPECT_NO_THROW(ok.check_admissible(make_theta(0.9)));
}

TEST(ArModel, ZeroCoefficientPathIsTheNoiseSequence) {
  ArGaussianModel m(vec({0.0}));
  PathSpec spec;
  spec.horizon = 200;
  spec.seed = 99;
  const Path p = simulate_path(m, spec);
  RandomStream rng(99);
  for (std::size_t n = 1; n <= 200; ++n) EXPECT_EQ(p.at(n)[0], rng.gaussian());
}

TEST(ArModel, PostChangeVarianceMatchesStationaryValue) {
  ArGaussianModel m(vec({0.0}));
  PathSpec spec;
  spec.change_point = 0;
  spec.true_theta = make_theta(0.5);
  spec.horizon = 100000;
  spec.seed = 2024;
  const Path p = simulate_path(m, spec);
  SampleSummary s;
  for (double x : p.values) s.add(x * x);
  EXPECT_NEAR(s.mean(), 4.0 / 3.0, 0.05 * 4.0 / 3.0);
}

TEST(ArModel, Ar2LongRunCovarianceMatchesLyapunov) {
  const Vector a = vec({0.5, 0.2});
  ArGaussianModel m(a);
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;
  const Matrix f = solve_stationary_covariance(companion_matrix(a), b);
  PathSpec spec;
  spec.horizon = 100000;
  spec.seed = 77;
  spec.initial = InitialState::Stationary;
  const Path p = simulate_path(m, spec);
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t n = 2; n <= p.length(); ++n) {
    c0 += p.at(n)[0] * p.at(n)[0];
    c1 += p.at(n)[0] * p.at(n - 1)[0];
  }
  c0 /= static_cast<double>(p.length() - 1);
  c1 /= static_cast<double>(p.length() - 1);
  EXPECT_NEAR(c0, f(0, 0), 0.05 * f(0, 0));
  EXPECT_NEAR(c1, f(0, 1), 0.05 * f(0, 1));
}

TEST(ArModel, StationaryInitialStateHasStationaryVariance) {
  ArGaussianModel m(vec({0.5}));
  SampleSummary s;
  std::vector<double> out(1);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    RandomStream rng(replication_seed(5, i));
    m.initial_state(InitialState::Stationary, rng, out);
    s.add(out[0] * out[0]);
  }
  EXPECT_NEAR(s.mean(), 4.0 / 3.0, 0.05);
}

TEST(ArModel, LikelihoodRatioHasUnitMean) {
  ArGaussianModel m(vec({0.2, 0.1}));
  const std::vector<double> state = {0.8, -1.1};
  const Vector theta = vec({0.5, -0.1});
  RandomStream rng(11);
  SampleSummary s;
  double y = 0.0;
  for (int i = 0; i < 100000; ++i) {
    m.sample(state, {}, rng, {&y, 1});
    s.add(std::exp(m.llr(theta, {&y, 1}, state)));
  }
  EXPECT_NEAR(s.mean(), 1.0, 3 * s.std_error());
}

TEST(IidModel, LlrAndUnitMean) {
  IidGaussianShiftModel m(0.0);
  const double x = 1.5;
  EXPECT_DOUBLE_EQ(m.llr(make_theta(1.0), {&x, 1}, {}), 1.0 * 1.5 - 0.5);
  EXPECT_THROW(m.check_admissible(make_theta(0.0)), ParameterError);
  RandomStream rng(4);
  SampleSummary s;
  double y = 0.0;
  for (int i = 0; i < 100000; ++i) {
    m.sample({}, {}, rng, {&y, 1});
    s.add(std::exp(m.llr(make_theta(0.7), {&y, 1}, {})));
  }
  EXPECT_NEAR(s.mean(), 1.0, 3 * s.std_error());
}

TEST(MvLinearModel, ConditionalCovarianceUsesRowMajorConvention) {
  const MvLinearModel m = bivariate_model(0.04);
  const std::vector<double> x = {1.5, -0.5};
  const Matrix g = m.conditional_covariance(x);
  Matrix expected = m.q0();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) expected(i, j) += m.q1()(i * 2 + k, j * 2 + l) * x[k] * x[l];
  EXPECT_LT((g - expected).cwiseAbs().maxCoeff(), 1e-15);
  // E[B_00 B_11] = Q1(0, 3) enters G(0,1) through x_0 x_1.
  EXPECT_NEAR(expected(0, 1) - m.q0()(0, 1), 0.3 * 0.04 * x[0] * x[1], 1e-15);
}

TEST(MvLinearModel, ValidatesInputs) {
  Matrix a0 = Matrix::Identity(2, 2) * 0.5;
  Matrix q0 = Matrix::Identity(2, 2);
  Matrix q1 = Matrix::Identity(4, 4) * 0.01;
  Matrix bad = q0;
  bad(0, 1) = 0.3;
  EXPECT_THROW(MvLinearModel(a0, bad, q1), ParameterError);
  EXPECT_THROW(MvLinearModel(a0, -q0, q1), ParameterError);
  EXPECT_THROW(MvLinearModel(a0, q0, Matrix::Identity(3, 3)), ParameterError);
  EXPECT_THROW(MvLinearModel(Matrix::Identity(2, 2) * 0.99, q0, Matrix::Identity(4, 4) * 0.1), InstabilityError);
  const MvLinearModel m(a0, q0, q1);
  EXPECT_THROW(m.check_admissible(flatten_row_major(a0)), ParameterError);
  EXPECT_THROW(m.check_admissible(flatten_row_major(Matrix::Identity(2, 2) * 1.1)), InstabilityError);
}

TEST(MvLinearModel, LlrAtPreChangeIsZeroAndBatchMatchesScalar) {
  const MvLinearModel m = bivariate_model();
  RandomStream rng(8);
  const std::vector<Vector> thetas = {m.pre_params(), vec({0.8, 0.1, 0.0, 0.4}), vec({0.2, -0.1, 0.3, 0.4})};
  std::vector<double> batch(thetas.size());
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x = {rng.gaussian(), rng.gaussian()};
    const std::vector<double> y = {rng.gaussian(), rng.gaussian()};
    m.llr_batch(thetas, y, x, batch);
    EXPECT_EQ(batch[0], 0.0);
    EXPECT_EQ(m.llr(thetas[0], y, x), 0.0);
    for (std::size_t j = 1; j < thetas.size(); ++j) EXPECT_NEAR(batch[j], m.llr(thetas[j], y, x), 1e-12);
  }
}

TEST(MvLinearModel, LikelihoodRatioHasUnitMean) {
  const MvLinearModel m = bivariate_model(0.05);
  const std::vector<double> state = {0.7, -0.4};
  const Vector theta = vec({0.7, 0.0, 0.1, 0.3});
  RandomStream rng(12);
  SampleSummary s;
  std::vector<double> y(2);
  for (int i = 0; i < 100000; ++i) {
    m.sample(state, {}, rng, y);
    s.add(std::exp(m.llr(theta, y, state)));
  }
  EXPECT_NEAR(s.mean(), 1.0, 3 * s.std_error());
}

TEST(MvLinearModel, RegimeSwitchesAtChangePoint) {
  const MvLinearModel m = bivariate_model();
  const Vector theta = vec({0.8, -0.2, 0.3, 0.6});
  constexpr std::size_t kNu = 5;
  // One-step least squares on (X_{n-1}, X_n) pairs pooled over replications,
  // once for pre-change steps (n <= nu) and once for post-change steps.
  Matrix sxy_pre = Matrix::Zero(2, 2), sxx_pre = Matrix::Zero(2, 2);
  Matrix sxy_post = Matrix::Zero(2, 2), sxx_post = Matrix::Zero(2, 2);
  for (std::uint64_t r = 0; r < 100000; ++r) {
    PathSampler s(m, kNu, &theta, replication_seed(31, r), InitialState::Stationary);
    for (std::size_t n = 1; n <= kNu + 3; ++n) {
      const Eigen::Vector2d prev(s.state()[0], s.state()[1]);
      const auto x = s.advance();
      const Eigen::Vector2d cur(x[0], x[1]);
      if (n <= kNu) {
        sxy_pre += cur * prev.transpose();
        sxx_pre += prev * prev.transpose();
      } else {
        sxy_post += cur * prev.transpose();
        sxx_post += prev * prev.transpose();
      }
    }
  }
  const Matrix a_pre = sxy_pre * sxx_pre.inverse();
  const Matrix a_post = sxy_post * sxx_post.inverse();
  EXPECT_LT((a_pre - m.a0()).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((a_post - unflatten_square(theta)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Paths, SimulationIsDeterministic) {
  const MvLinearModel m = bivariate_model();
  PathSpec spec;
  spec.change_point = 10;
  spec.true_theta = vec({0.8, 0.1, 0.0, 0.4});
  spec.horizon = 50;
  spec.seed = 1234;
  EXPECT_EQ(simulate_path(m, spec).values, simulate_path(m, spec).values);
  spec.change_point = std::nullopt;
  EXPECT_EQ(simulate_path(m, spec).values, simulate_path(m, spec).values);
}

TEST(Paths, InadmissibleThetaRejected) {
  ArGaussianModel m(vec({0.0}));
  PathSpec spec;
  spec.change_point = 3;
  spec.true_theta = make_theta(0.0);
  EXPECT_THROW(simulate_path(m, spec), ParameterError);
  spec.true_theta = make_theta(0.5);
  spec.horizon = 0;
  EXPECT_THROW(simulate_path(m, spec), ParameterError);
}

TEST(Paths, CsvRoundTrip) {
  ArGaussianModel m(vec({0.5, 0.2}));
  PathSpec spec;
  spec.change_point = 4;
  spec.true_theta = vec({0.1, 0.6});
  spec.horizon = 20;
  spec.seed = 6;
  spec.initial = InitialState::Stationary;
  const Path p = simulate_path(m, spec);
  std::stringstream io;
  write_path_csv(io, p, m.order());
  const Path q = read_path_csv(io);
  EXPECT_EQ(q.obs_dim, p.obs_dim);
  EXPECT_EQ(q.initial_state, p.initial_state);
  EXPECT_EQ(q.values, p.values);
}

TEST(Paths, ReplayReproducesSampler) {
  ArGaussianModel m(vec({0.3}));
  const Vector theta = make_theta(0.8);
  PathSpec spec;
  spec.change_point = 7;
  spec.true_theta = theta;
  spec.horizon = 30;
  spec.seed = 21;
  const Path p = simulate_path(m, spec);
  PathSampler sampler(m, 7, &theta, 21);
  PathReplay replay(m, p);
  for (std::size_t n = 1; n <= 30; ++n) {
    EXPECT_EQ(sampler.advance()[0], replay.advance()[0]);
    EXPECT_EQ(sampler.state()[0], replay.state()[0]);
  }
  EXPECT_EQ(replay.remaining(), 0u);
}

TEST(Paths, MalformedCsvIsStateError) {
  std::stringstream bad("index,x1\n1,abc\n");
  EXPECT_THROW(read_path_csv(bad), StateError);
  std::stringstream empty("");
  EXPECT_THROW(read_path_csv(empty), StateError);
}
