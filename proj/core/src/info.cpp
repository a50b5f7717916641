#include "quickdetect/info.hpp"

#include <cmath>

#include "quickdetect/errors.hpp"
#include "quickdetect/parallel.hpp"
#include "quickdetect/rng.hpp"

namespace quickdetect {

namespace {

constexpr int kMaxDoublings = 200;

double residual_norm(const Matrix& f, const Matrix& a, const Matrix& b) {
  return (f - a * f * a.transpose() - b).cwiseAbs().maxCoeff();
}

}  // namespace

std::string to_string(InfoMethod method) {
  switch (method) {
    case InfoMethod::ClosedForm: return "closed-form";
    case InfoMethod::Lyapunov: return "lyapunov";
    case InfoMethod::Empirical: return "empirical";
  }
  return "unknown";
}

LyapunovReport solve_lyapunov_doubling(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw ParameterError("Lyapunov solver needs square A and B of equal size");
  const double rho = spectral_radius(a);
  if (rho >= 1.0)
    throw InstabilityError("spectral radius " + std::to_string(rho) + " >= 1: no stationary covariance");

  LyapunovReport report;
  Matrix f = b;
  Matrix power = a;  // A^(2^k)
  // The residual shrinks faster than the truncation error (by about 1 - rho^2),
  // so iterate until the added tail no longer changes F at double precision.
  for (int k = 0; k < kMaxDoublings; ++k) {
    const Matrix tail = power * f * power.transpose();
    f += tail;
    power = power * power;
    report.iterations = k + 1;
    const double scale = f.cwiseAbs().maxCoeff();
    if (power.cwiseAbs().maxCoeff() < 1e-18 || tail.cwiseAbs().maxCoeff() <= 1e-17 * scale) break;
  }
  report.solution = (f + f.transpose()) / 2.0;
  report.residual = residual_norm(report.solution, a, b);
  return report;
}

Matrix solve_stationary_covariance(const Matrix& a, const Matrix& b) {
  return solve_lyapunov_doubling(a, b).solution;
}

InfoResult info_number_ar(const Vector& theta, const Vector& a) {
  if (theta.size() != a.size() || theta.size() == 0)
    throw ParameterError("theta and a must be non-empty and of equal length");
  const double rho_a = spectral_radius(companion_matrix(a));
  if (rho_a >= 1.0) throw InstabilityError("pre-change AR spectral radius " + std::to_string(rho_a) + " >= 1");
  const auto p = theta.size();
  Matrix b = Matrix::Zero(p, p);
  b(0, 0) = 1.0;
  const Matrix f = solve_stationary_covariance(companion_matrix(theta), b);
  const Vector d = theta - a;
  return InfoResult{0.5 * d.dot(f * d), InfoMethod::Lyapunov, 0.0};
}

InfoResult info_number_ar1_closed_form(double theta) {
  if (!(std::abs(theta) < 1.0)) throw InstabilityError("AR(1) coefficient must satisfy |theta| < 1");
  return InfoResult{theta * theta / (2.0 * (1.0 - theta * theta)), InfoMethod::ClosedForm, 0.0};
}

InfoResult info_number_empirical(const ChangeModel& model, const Vector& theta,
                                 const EmpiricalInfoOptions& options) {
  if (options.steps < 1) throw ParameterError("empirical information needs at least one step");
  if (options.replications < 2) throw ParameterError("empirical information needs at least two replications");
  if (static_cast<std::size_t>(theta.size()) != model.param_dim())
    throw ParameterError("parameter dimension does not match the model");
  if (theta == model.pre_params()) return InfoResult{0.0, InfoMethod::Empirical, 0.0};
  model.check_admissible(theta);

  const auto means = run_replications<double>(options.replications, options.threads, [&](std::size_t i) {
    // Change at nu = 0: every step follows the post-change law.
    PathSampler sampler(model, std::size_t{0}, &theta, replication_seed(options.seed, i));
    for (std::size_t n = 0; n < options.burn_in; ++n) sampler.advance();
    std::vector<double> history(model.state_size());
    double sum = 0.0;
    for (std::size_t n = 0; n < options.steps; ++n) {
      history.assign(sampler.state().begin(), sampler.state().end());
      const auto x = sampler.advance();
      sum += model.llr(theta, x, history);
    }
    return sum / static_cast<double>(options.steps);
  });
  SampleSummary summary;
  for (double m : means) summary.add(m);
  return InfoResult{summary.mean(), InfoMethod::Empirical, summary.std_error()};
}

InfoResult info_number(const ChangeModel& model, const Vector& theta, const EmpiricalInfoOptions& fallback) {
  if (static_cast<std::size_t>(theta.size()) != model.param_dim())
    throw ParameterError("parameter dimension does not match the model");
  switch (model.family()) {
    case ModelFamily::IidGaussianShift: {
      const double d = theta[0] - model.pre_params()[0];
      return InfoResult{0.5 * d * d, InfoMethod::ClosedForm, 0.0};
    }
    case ModelFamily::ArGaussian:
      if (theta.size() == 1 && model.pre_params()[0] == 0.0) return info_number_ar1_closed_form(theta[0]);
      return info_number_ar(theta, model.pre_params());
    case ModelFamily::MvLinearRandomCoeff:
      break;
  }
  return info_number_empirical(model, theta, fallback);
}

double first_order_risk(double threshold, double info, double moment_order) {
  if (!(info > 0.0) || !std::isfinite(info))
    throw ParameterError("first-order risk needs a positive information number");
  if (!(threshold > 0.0)) throw ParameterError("first-order risk needs a positive threshold");
  if (!(moment_order >= 1.0)) throw ParameterError("moment order must be at least 1");
  return std::pow(threshold / info, moment_order);
}

}  // namespace quickdetect
