#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "quickdetect/linalg.hpp"
#include "quickdetect/model.hpp"

namespace quickdetect {

enum class InfoMethod { ClosedForm, Lyapunov, Empirical };

std::string to_string(InfoMethod method);

// Kullback-Leibler rate I_theta, in nats per observation.
struct InfoResult {
  double value = 0.0;
  InfoMethod method = InfoMethod::Lyapunov;
  double std_error = 0.0;  // zero for the analytic methods
};

struct LyapunovReport {
  Matrix solution;
  double residual = 0.0;  // max-abs entry of F - A F A^T - B
  int iterations = 0;
};

// Solves F = A F A^T + B, i.e. F = sum_n A^n B (A^T)^n, by doubling:
// F <- F + A F A^T, A <- A^2. Throws InstabilityError when the spectral
// radius of A is not below one.
LyapunovReport solve_lyapunov_doubling(const Matrix& a, const Matrix& b);

Matrix solve_stationary_covariance(const Matrix& a, const Matrix& b);

// I = (theta - a)^T F(theta) (theta - a) / 2 with F(theta) the stationary
// covariance of the post-change AR state vector.
InfoResult info_number_ar(const Vector& theta, const Vector& a);

// theta^2 / (2 (1 - theta^2)): AR(1) with zero pre-change coefficient.
InfoResult info_number_ar1_closed_form(double theta);

struct EmpiricalInfoOptions {
  std::size_t burn_in = 1000;
  std::size_t steps = 2000;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Batch-means estimate of the ergodic mean of the LLR increment under the
// post-change regime: each replication averages `steps` increments after
// `burn_in` post-change steps from the zero state; std_error comes from the
// spread of the replication means.
InfoResult info_number_empirical(const ChangeModel& model, const Vector& theta,
                                 const EmpiricalInfoOptions& options);

// Analytic value where one exists (closed form for the i.i.d. shift and for
// AR(1) with a zero pre-change coefficient, Lyapunov for general AR(p));
// otherwise the empirical estimator with `fallback` options.
InfoResult info_number(const ChangeModel& model, const Vector& theta,
                       const EmpiricalInfoOptions& fallback = {});

// First-order risk approximation (a / I)^r.
double first_order_risk(double threshold, double info, double moment_order = 1.0);

}  // namespace quickdetect
