#include "quickdetect/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <utility>

#include "quickdetect/errors.hpp"
#include "quickdetect/info.hpp"
#include "quickdetect/parallel.hpp"
#include "quickdetect/rng.hpp"

namespace quickdetect {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kCensorWarnRate = 1e-3;

void require_replications(const MonteCarloConfig& cfg) {
  if (cfg.replications < 1) throw ParameterError("replication count must be at least 1");
}

Estimate binomial_estimate(std::size_t hits, std::size_t trials) {
  Estimate e;
  e.n_used = trials;
  e.n_total = trials;
  if (trials == 0) return e;
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  e.mean = p;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  e.ci95 = {std::max(0.0, p - kZ95 * e.std_error), std::min(1.0, p + kZ95 * e.std_error)};
  return e;
}

// Record values of the statistic along one pre-change path: (n, s_n) each
// time s_n exceeds every earlier value. The first alarm for threshold a is
// the first record with s_n >= a.
struct RecordPath {
  std::vector<std::pair<std::size_t, double>> records;

  std::size_t stop_time(double a, std::size_t horizon) const {
    for (const auto& [n, s] : records)
      if (s >= a) return n;
    return horizon + 1;
  }
};

}  // namespace

double SampleSummary::std_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

unsigned resolve_thread_count(unsigned requested) {
  unsigned n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QUICKDETECT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

Estimate summarize(const std::vector<double>& values, std::size_t n_total) {
  SampleSummary s;
  for (double v : values) s.add(v);
  Estimate e;
  e.mean = s.mean();
  e.std_error = s.std_error();
  e.ci95 = {e.mean - kZ95 * e.std_error, e.mean + kZ95 * e.std_error};
  e.n_used = s.count();
  e.n_total = n_total;
  return e;
}

std::size_t default_delay_cap(const StoppingRule& rule, const ChangeModel& model) {
  if (model.family() == ModelFamily::MvLinearRandomCoeff) return 100000;
  double info_min = std::numeric_limits<double>::infinity();
  for (const auto& theta : rule.grid().points()) info_min = std::min(info_min, info_number(model, theta).value);
  if (!(info_min > 0.0)) return 100000;
  const double cap = std::ceil(50.0 * std::max(rule.threshold(), 0.0) / info_min);
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::min(cap, 1e9)));
}

Estimate DelaySample::conditional_moment(double r) const {
  std::vector<double> values;
  values.reserve(outcomes.size());
  std::size_t discarded = 0;
  std::size_t censored = 0;
  for (const auto& o : outcomes) {
    switch (o.status) {
      case DelayStatus::Stopped: {
        const double d = static_cast<double>(o.time - change_point);
        values.push_back(r == 1.0 ? d : std::pow(d, r));
        break;
      }
      case DelayStatus::Discarded: ++discarded; break;
      case DelayStatus::Censored: ++censored; break;
    }
  }
  if (values.empty())
    throw EstimationError("no usable replications: " + std::to_string(discarded) + " stopped before the change, " +
                          std::to_string(censored) + " censored at N_max=" + std::to_string(delay_cap));
  Estimate e = summarize(values, outcomes.size());
  const double total = static_cast<double>(outcomes.size());
  e.discard_rate = static_cast<double>(discarded) / total;
  e.censor_rate = static_cast<double>(censored) / total;
  if (e.censor_rate > kCensorWarnRate) {
    std::ostringstream msg;
    msg << "censor rate " << e.censor_rate << " exceeds " << kCensorWarnRate << " at N_max=" << delay_cap
        << "; censored replications excluded";
    e.warnings.push_back(msg.str());
  }
  return e;
}

double DelaySample::ratio_moment(double r) const {
  double sum = 0.0;
  std::size_t stopped = 0;
  std::size_t uncensored = 0;
  for (const auto& o : outcomes) {
    if (o.status == DelayStatus::Censored) continue;
    ++uncensored;
    if (o.status == DelayStatus::Stopped) {
      ++stopped;
      sum += std::pow(static_cast<double>(o.time - change_point), r);
    }
  }
  if (stopped == 0) throw EstimationError("no replication stopped after the change");
  const double n = static_cast<double>(uncensored);
  return (sum / n) / (static_cast<double>(stopped) / n);
}

DelaySample simulate_delays(const StoppingRule& rule, const ChangeModel& model, const Vector& theta,
                            std::size_t change_point, const MonteCarloConfig& cfg) {
  require_replications(cfg);
  if (static_cast<std::size_t>(theta.size()) != model.param_dim())
    throw ParameterError("parameter dimension does not match the model");
  model.check_admissible(theta);
  if (rule.grid().param_dim() != model.param_dim())
    throw ParameterError("rule parameter dimension does not match the model");

  DelaySample sample;
  sample.change_point = change_point;
  sample.delay_cap = cfg.delay_cap > 0 ? cfg.delay_cap : default_delay_cap(rule, model);
  const std::size_t horizon = change_point + sample.delay_cap;
  sample.outcomes = run_replications<DelayOutcome>(cfg.replications, cfg.threads, [&](std::size_t i) {
    PathSampler source(model, change_point, &theta, replication_seed(cfg.seed, i), cfg.initial);
    const StopResult stop = run_rule(rule, model, source, horizon);
    DelayOutcome out;
    out.time = stop.time;
    if (!stop.alarmed)
      out.status = DelayStatus::Censored;
    else
      out.status = stop.time <= change_point ? DelayStatus::Discarded : DelayStatus::Stopped;
    return out;
  });
  return sample;
}

Estimate estimate_moment_risk(const StoppingRule& rule, const ChangeModel& model, const Vector& theta,
                              std::size_t change_point, double r, const MonteCarloConfig& cfg) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw ParameterError("moment order must be at least 1");
  return simulate_delays(rule, model, theta, change_point, cfg).conditional_moment(r);
}

Estimate estimate_add(const StoppingRule& rule, const ChangeModel& model, const Vector& theta,
                      std::size_t change_point, const MonteCarloConfig& cfg) {
  return estimate_moment_risk(rule, model, theta, change_point, 1.0, cfg);
}

std::vector<std::size_t> simulate_prechange_stops(const StoppingRule& rule, const ChangeModel& model,
                                                  std::size_t horizon, const MonteCarloConfig& cfg) {
  require_replications(cfg);
  if (rule.grid().param_dim() != model.param_dim())
    throw ParameterError("rule parameter dimension does not match the model");
  return run_replications<std::size_t>(cfg.replications, cfg.threads, [&](std::size_t i) {
    PathSampler source(model, std::nullopt, nullptr, replication_seed(cfg.seed, i), cfg.initial);
    const StopResult stop = run_rule(rule, model, source, horizon);
    return stop.alarmed ? stop.time : horizon + 1;
  });
}

LcpfaEstimate lcpfa_from_stops(const std::vector<std::size_t>& stops, std::size_t ell, std::size_t m) {
  if (ell < 1 || m < 1) throw ParameterError("LCPFA needs ell >= 1 and m >= 1");
  const std::size_t horizon = ell + m - 1;
  // count[t] = #{tau = t} for t <= horizon; later alarms and no alarm share horizon + 1.
  std::vector<std::size_t> count(horizon + 2, 0);
  for (std::size_t t : stops) ++count[std::min(t, horizon + 1)];
  // at_least[k] = #{tau >= k}
  std::vector<std::size_t> at_least(horizon + 3, 0);
  for (std::size_t t = horizon + 1; t >= 1; --t) at_least[t] = at_least[t + 1] + count[t];

  LcpfaEstimate result;
  result.per_k.assign(ell, std::numeric_limits<double>::quiet_NaN());
  double best = -1.0;
  std::size_t best_den = 0;
  std::size_t best_num = 0;
  for (std::size_t k = 1; k <= ell; ++k) {
    const std::size_t den = at_least[k];
    if (den == 0) continue;
    const std::size_t num = den - at_least[k + m];
    const double ratio = static_cast<double>(num) / static_cast<double>(den);
    result.per_k[k - 1] = ratio;
    if (ratio > best) {
      best = ratio;
      best_den = den;
      best_num = num;
      result.argmax_k = k;
    }
  }
  if (result.argmax_k == 0) throw EstimationError("every LCPFA denominator #{tau >= k} is zero");
  result.estimate = binomial_estimate(best_num, best_den);
  result.estimate.n_total = stops.size();
  return result;
}

LcpfaEstimate estimate_lcpfa(const StoppingRule& rule, const ChangeModel& model, std::size_t ell, std::size_t m,
                             const MonteCarloConfig& cfg) {
  if (ell < 1 || m < 1) throw ParameterError("LCPFA needs ell >= 1 and m >= 1");
  return lcpfa_from_stops(simulate_prechange_stops(rule, model, ell + m - 1, cfg), ell, m);
}

WeightedPfaEstimate estimate_weighted_pfa(const StoppingRule& rule, const ChangeModel& model, double rho,
                                          const MonteCarloConfig& cfg) {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("geometric prior needs 0 < rho < 1");
  constexpr double kTail = 1e-4;
  WeightedPfaEstimate out;
  const double log_q = std::log1p(-rho);
  out.horizon = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log(kTail) / log_q) - 1.0));
  out.tail_bound = std::exp(static_cast<double>(out.horizon + 1) * log_q);

  const auto stops = simulate_prechange_stops(rule, model, std::max<std::size_t>(out.horizon, 1), cfg);
  std::vector<double> values(stops.size());
  for (std::size_t i = 0; i < stops.size(); ++i)
    values[i] = stops[i] <= out.horizon ? std::exp(static_cast<double>(stops[i]) * log_q) : 0.0;
  out.estimate = summarize(values, values.size());
  out.estimate.ci95.lower = std::max(0.0, out.estimate.ci95.lower);
  out.estimate.ci95.upper += out.tail_bound;
  return out;
}

CalibrationResult calibrate_threshold(const StoppingRule& rule, const ChangeModel& model,
                                      const CalibrationTarget& target, const MonteCarloConfig& cfg) {
  if (!(target.beta > 0.0 && target.beta < 1.0)) throw ParameterError("LCPFA target beta must lie in (0, 1)");
  if (target.ell < 1 || target.m < 1) throw ParameterError("LCPFA needs ell >= 1 and m >= 1");
  require_replications(cfg);
  constexpr double kLow = 0.0;
  constexpr double kHigh = 40.0;
  constexpr int kMaxIterations = 60;
  const std::size_t horizon = target.ell + target.m - 1;

  const auto paths = run_replications<RecordPath>(cfg.replications, cfg.threads, [&](std::size_t i) {
    PathSampler source(model, std::nullopt, nullptr, replication_seed(cfg.seed, i), cfg.initial);
    RecordPath path;
    double best = kLogZero;
    for_each_statistic(rule, model, source, horizon, [&](std::size_t n, double s, std::span<const double>) {
      if (s > best) {
        best = s;
        path.records.emplace_back(n, s);
      }
      return true;
    });
    return path;
  });

  std::vector<std::size_t> stops(paths.size());
  auto evaluate = [&](double a) {
    for (std::size_t i = 0; i < paths.size(); ++i) stops[i] = paths[i].stop_time(a, horizon);
    return lcpfa_from_stops(stops, target.ell, target.m);
  };
  auto close_enough = [&](const LcpfaEstimate& e) {
    return std::abs(e.estimate.mean - target.beta) <= std::max(2.0 * e.estimate.std_error, 0.05 * target.beta);
  };

  CalibrationResult result;
  auto low = evaluate(kLow);
  auto high = evaluate(kHigh);
  if (close_enough(low)) return {kLow, low, 0, true};
  if (close_enough(high)) return {kHigh, high, 0, true};
  if (low.estimate.mean < target.beta || high.estimate.mean > target.beta) {
    std::ostringstream msg;
    msg << "LCPFA target " << target.beta << " not bracketed on [" << kLow << ", " << kHigh
        << "] nats: estimates " << low.estimate.mean << " and " << high.estimate.mean;
    throw CalibrationError(msg.str());
  }

  double lo = kLow;
  double hi = kHigh;
  result.threshold = hi;
  result.achieved = high;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto e = evaluate(mid);
    result.iterations = it;
    result.threshold = mid;
    result.achieved = e;
    if (close_enough(e)) {
      result.converged = true;
      return result;
    }
    if (e.estimate.mean > target.beta)
      lo = mid;
    else
      hi = mid;
  }
  return result;
}

std::vector<SllnPoint> slln_diagnostic(const ChangeModel& model, const Vector& theta, std::size_t change_point,
                                       const std::vector<std::size_t>& ns, double epsilon, double info,
                                       const MonteCarloConfig& cfg) {
  require_replications(cfg);
  if (ns.empty()) throw ParameterError("SLLN diagnostic needs at least one n");
  if (!(epsilon > 0.0)) throw ParameterError("SLLN tolerance epsilon must be positive");
  for (std::size_t n : ns)
    if (n < 1) throw ParameterError("SLLN diagnostic needs n >= 1");
  model.check_admissible(theta);
  const std::size_t n_max = *std::max_element(ns.begin(), ns.end());

  // Entry j is set when the deviation at ns[j] exceeds epsilon.
  using Flags = std::vector<char>;
  const auto flags = run_replications<Flags>(cfg.replications, cfg.threads, [&](std::size_t i) {
    PathSampler source(model, change_point, &theta, replication_seed(cfg.seed, i), cfg.initial);
    std::vector<double> history(model.state_size());
    for (std::size_t n = 0; n < change_point; ++n) source.advance();
    Flags out(ns.size(), 0);
    double z = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      history.assign(source.state().begin(), source.state().end());
      const auto x = source.advance();
      z += model.llr(theta, x, history);
      for (std::size_t j = 0; j < ns.size(); ++j)
        if (ns[j] == n) out[j] = std::abs(z / static_cast<double>(n) - info) > epsilon;
    }
    return out;
  });

  std::vector<SllnPoint> points;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    std::size_t hits = 0;
    for (const auto& f : flags) hits += f[j] ? 1 : 0;
    points.push_back({ns[j], binomial_estimate(hits, flags.size())});
  }
  return points;
}

std::vector<Estimate> statistic_mean_profile(const ParameterGrid& grid, const ChangeModel& model,
                                             const std::vector<std::size_t>& ns, const MonteCarloConfig& cfg) {
  require_replications(cfg);
  if (ns.empty()) throw ParameterError("mean profile needs at least one n");
  const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
  if (n_max < 1) throw ParameterError("mean profile needs n >= 1");
  const StoppingRule rule = StoppingRule::wsr(grid, 0.0);

  const auto rows = run_replications<std::vector<double>>(cfg.replications, cfg.threads, [&](std::size_t i) {
    PathSampler source(model, std::nullopt, nullptr, replication_seed(cfg.seed, i), cfg.initial);
    std::vector<double> out(ns.size(), 0.0);
    for_each_statistic(rule, model, source, n_max, [&](std::size_t n, double s, std::span<const double>) {
      for (std::size_t j = 0; j < ns.size(); ++j)
        if (ns[j] == n) out[j] = std::exp(s);
      return true;
    });
    return out;
  });

  std::vector<Estimate> estimates;
  std::vector<double> column(rows.size());
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i][j];
    estimates.push_back(summarize(column, rows.size()));
  }
  return estimates;
}

}  // namespace quickdetect
