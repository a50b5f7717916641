#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quickdetect/model.hpp"
#include "quickdetect/procedures.hpp"

namespace quickdetect {

struct MonteCarloConfig {
  std::size_t replications = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;        // 0: hardware concurrency, capped by QUICKDETECT_THREADS
  std::size_t delay_cap = 0;   // N_max; 0 picks default_delay_cap()
  InitialState initial = InitialState::Zero;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  Interval ci95;
  std::size_t n_used = 0;
  std::size_t n_total = 0;
  double censor_rate = 0.0;
  double discard_rate = 0.0;
  std::vector<std::string> warnings;
};

// max(1000, ceil(50 a / I_min)) with I_min the smallest information number on
// the rule's grid. Models without an analytic information number get 100000.
std::size_t default_delay_cap(const StoppingRule& rule, const ChangeModel& model);

enum class DelayStatus {
  Stopped,    // tau > nu within the cap
  Discarded,  // tau <= nu
  Censored,   // no alarm by nu + N_max
};

struct DelayOutcome {
  std::size_t time = 0;  // alarm time, or the last step simulated
  DelayStatus status = DelayStatus::Censored;
};

// Per-replication outcomes under a change at nu to theta, indexed by replication.
struct DelaySample {
  std::size_t change_point = 0;
  std::size_t delay_cap = 0;
  std::vector<DelayOutcome> outcomes;

  // Conditional form: mean of (tau - nu)^r over Stopped replications.
  Estimate conditional_moment(double r) const;
  // Ratio form E[((tau - nu)^+)^r] / P(tau > nu) over uncensored replications.
  double ratio_moment(double r) const;
};

DelaySample simulate_delays(const StoppingRule& rule, const ChangeModel& model, const Vector& theta,
                            std::size_t change_point, const MonteCarloConfig& cfg);

// E[tau - nu | tau > nu]. Throws EstimationError when no replication is usable.
Estimate estimate_add(const StoppingRule& rule, const ChangeModel& model, const Vector& theta,
                      std::size_t change_point, const MonteCarloConfig& cfg);

// E[(tau - nu)^r | tau > nu], r >= 1.
Estimate estimate_moment_risk(const StoppingRule& rule, const ChangeModel& model, const Vector& theta,
                              std::size_t change_point, double r, const MonteCarloConfig& cfg);

struct LcpfaEstimate {
  Estimate estimate;       // value and binomial SE at the argmax
  std::size_t argmax_k = 0;
  std::vector<double> per_k;  // ratio for k = 1..ell, NaN where #{tau >= k} = 0
};

// Alarm times of pre-change paths of length `horizon`; horizon + 1 marks no alarm.
std::vector<std::size_t> simulate_prechange_stops(const StoppingRule& rule, const ChangeModel& model,
                                                  std::size_t horizon, const MonteCarloConfig& cfg);

// max_{1<=k<=ell} #{k <= tau < k+m} / #{tau >= k} from alarm times observed to
// horizon ell + m - 1.
LcpfaEstimate lcpfa_from_stops(const std::vector<std::size_t>& stops, std::size_t ell, std::size_t m);

LcpfaEstimate estimate_lcpfa(const StoppingRule& rule, const ChangeModel& model, std::size_t ell,
                             std::size_t m, const MonteCarloConfig& cfg);

struct WeightedPfaEstimate {
  Estimate estimate;  // ci95.upper includes the truncation tail
  std::size_t horizon = 0;
  double tail_bound = 0.0;
};

// sum_{k>=0} rho (1-rho)^k P(tau <= k) under no change. A replication with
// alarm at tau <= K contributes (1-rho)^tau exactly; K is the smallest horizon
// with (1-rho)^(K+1) <= 1e-4.
WeightedPfaEstimate estimate_weighted_pfa(const StoppingRule& rule, const ChangeModel& model, double rho,
                                          const MonteCarloConfig& cfg);

struct CalibrationTarget {
  double beta = 0.01;
  std::size_t ell = 1;
  std::size_t m = 1;
};

struct CalibrationResult {
  double threshold = 0.0;
  LcpfaEstimate achieved;
  int iterations = 0;
  bool converged = false;
};

// Bisection on the threshold over [0, 40] nats. All evaluations reuse one set
// of pre-change paths (each path's record values of the statistic), so every
// threshold sees the same random numbers. Stops when
// |estimate - beta| <= max(2 SE, 0.05 beta). Throws CalibrationError when the
// target is not bracketed.
CalibrationResult calibrate_threshold(const StoppingRule& rule, const ChangeModel& model,
                                      const CalibrationTarget& target, const MonteCarloConfig& cfg);

struct SllnPoint {
  std::size_t n = 0;
  Estimate exceedance;
};

// Fraction of replications with |Z(n)/n - info| > epsilon, where Z(n) is the
// LLR of theta summed over observations nu+1..nu+n under a change at nu.
std::vector<SllnPoint> slln_diagnostic(const ChangeModel& model, const Vector& theta, std::size_t change_point,
                                       const std::vector<std::size_t>& ns, double epsilon, double info,
                                       const MonteCarloConfig& cfg);

// E_inf[R_n^W] at each n in `ns` under no change.
std::vector<Estimate> statistic_mean_profile(const ParameterGrid& grid, const ChangeModel& model,
                                             const std::vector<std::size_t>& ns, const MonteCarloConfig& cfg);

// Estimate from per-replication values reduced in index order.
Estimate summarize(const std::vector<double>& values, std::size_t n_total);

}  // namespace quickdetect
