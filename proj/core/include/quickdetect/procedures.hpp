#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "quickdetect/model.hpp"
#include "quickdetect/statistics.hpp"

namespace quickdetect {

enum class RuleKind {
  Wsr,  // weighted SR over a parameter grid
  Sr,   // SR tuned to a single post-change parameter
};

std::string to_string(RuleKind kind);

// Immutable description of a stopping time tau = inf{n >= 1 : log S_n >= threshold}
// with S the WSR or tuned SR statistic. Thresholds are in nats.
class StoppingRule {
 public:
  static StoppingRule wsr(ParameterGrid grid, double threshold);
  static StoppingRule sr(Vector theta, double log_b);

  RuleKind kind() const noexcept { return kind_; }
  double threshold() const noexcept { return threshold_; }
  // For Sr this is the singleton grid holding the tuned parameter.
  const ParameterGrid& grid() const noexcept { return grid_; }
  const Vector& tuned_theta() const noexcept { return grid_.points().front(); }

  StoppingRule with_threshold(double threshold) const;

 private:
  StoppingRule(RuleKind kind, ParameterGrid grid, double threshold);

  RuleKind kind_;
  ParameterGrid grid_;
  double threshold_;
};

// `time` is the alarm time when `alarmed`, else the number of observations
// processed before the horizon ran out.
struct StopResult {
  std::size_t time = 0;
  bool alarmed = false;
};

struct NoObserver {
  void operator()(std::size_t, double, std::span<const double>) const noexcept {}
};

// Feeds observations from `source` (PathSampler, PathReplay, or anything with
// state() and advance()) through the rule's statistic and calls
// on_step(n, log_statistic, log_r) after each update until it returns false or
// `horizon` observations have been used. Returns the number of steps taken.
template <class Source, class OnStep>
std::size_t for_each_statistic(const StoppingRule& rule, const ChangeModel& model, Source& source,
                               std::size_t horizon, OnStep&& on_step) {
  // advance() overwrites the source's state, so the conditioning state is
  // copied out first.
  std::vector<double> history;
  history.reserve(model.state_size());
  if (rule.kind() == RuleKind::Sr) {
    SrStatistic stat(rule.tuned_theta());
    for (std::size_t n = 1; n <= horizon; ++n) {
      history.assign(source.state().begin(), source.state().end());
      const auto x = source.advance();
      const double s = stat.update(model, x, history);
      if (!on_step(n, s, std::span<const double>(&s, 1))) return n;
    }
    return horizon;
  }
  WsrStatistic stat(rule.grid());
  for (std::size_t n = 1; n <= horizon; ++n) {
    history.assign(source.state().begin(), source.state().end());
    const auto x = source.advance();
    const double s = stat.update(model, x, history);
    if (!on_step(n, s, std::span<const double>(stat.state().log_r))) return n;
  }
  return horizon;
}

template <class Source, class Observer = NoObserver>
StopResult run_rule(const StoppingRule& rule, const ChangeModel& model, Source& source, std::size_t horizon,
                    Observer&& observer = {}) {
  StopResult result;
  const double a = rule.threshold();
  result.time = for_each_statistic(rule, model, source, horizon,
                                   [&](std::size_t n, double s, std::span<const double> log_r) {
                                     observer(n, s, log_r);
                                     if (s >= a) {
                                       result.alarmed = true;
                                       return false;
                                     }
                                     return true;
                                   });
  return result;
}

// Geometric prior P(nu = k) = rho (1 - rho)^k, k >= 0, with mean (1 - rho) / rho.
struct GeometricPrior {
  double rho;
};
struct PriorMean {
  double mean;
};
using ChangePointPrior = std::variant<GeometricPrior, PriorMean>;

double prior_mean(const ChangePointPrior& prior);

// Threshold log(mean / alpha) guaranteeing weighted PFA <= alpha.
double bayes_threshold(double alpha, const ChangePointPrior& prior);

// Window, span and threshold tied to an LCPFA bound beta.
struct ScheduleParams {
  double beta = 0.0;
  double kappa = 1.0;
  double delta_star = 0.5;
  double rho1 = 0.0;
  double delta_check = 0.0;
  double rho2 = 0.0;
  std::size_t m = 1;
  std::size_t ell = 1;
  std::size_t k_star = 2;
  double alpha2 = 0.0;
  double a_beta = 0.0;
};

// rho1 = 1/(1+|log b|), delta = delta*/(1+|log b|), rho2 = delta*rho1,
// m = floor(|log b|/rho1), ell = floor(kappa*m) (both at least 1),
// alpha2 = b (1-rho2)^(ell+m) / (1+b), a = log((1-alpha2)/(rho2 alpha2)).
ScheduleParams schedule_from_beta(double beta, double kappa = 1.0, double delta_star = 0.5);

struct Alpha1Result {
  double alpha1 = 0.0;
  double m0 = 0.0;          // |log(1-beta)| / |log(1-rho1)| - 1
  bool exceeds_m0 = false;  // m > m0, which makes alpha1 < 1
};

// alpha1 = beta + (1 - rho1)^(m+1).
Alpha1Result class_alpha1(double beta, std::size_t m, double rho1);

}  // namespace quickdetect
