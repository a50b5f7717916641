#include "quickdetect/procedures.hpp"

#include <algorithm>
#include <cmath>

#include "quickdetect/errors.hpp"

namespace quickdetect {

std::string to_string(RuleKind kind) { return kind == RuleKind::Wsr ? "wsr" : "sr"; }

StoppingRule::StoppingRule(RuleKind kind, ParameterGrid grid, double threshold)
    : kind_(kind), grid_(std::move(grid)), threshold_(threshold) {
  if (!std::isfinite(threshold_)) throw ParameterError("stopping threshold must be finite");
}

StoppingRule StoppingRule::wsr(ParameterGrid grid, double threshold) {
  return StoppingRule(RuleKind::Wsr, std::move(grid), threshold);
}

StoppingRule StoppingRule::sr(Vector theta, double log_b) {
  return StoppingRule(RuleKind::Sr, ParameterGrid::singleton(std::move(theta)), log_b);
}

StoppingRule StoppingRule::with_threshold(double threshold) const {
  return StoppingRule(kind_, grid_, threshold);
}

double prior_mean(const ChangePointPrior& prior) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GeometricPrior>) {
          if (!(p.rho > 0.0 && p.rho < 1.0)) throw ParameterError("geometric prior needs 0 < rho < 1");
          return (1.0 - p.rho) / p.rho;
        } else {
          if (!(p.mean > 0.0) || !std::isfinite(p.mean)) throw ParameterError("prior mean must be positive");
          return p.mean;
        }
      },
      prior);
}

double bayes_threshold(double alpha, const ChangePointPrior& prior) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("PFA bound alpha must lie in (0, 1)");
  return std::log(prior_mean(prior) / alpha);
}

ScheduleParams schedule_from_beta(double beta, double kappa, double delta_star) {
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ParameterError("kappa must be positive");
  if (!(delta_star > 0.0 && delta_star < 1.0)) throw ParameterError("delta_star must lie in (0, 1)");

  ScheduleParams s;
  s.beta = beta;
  s.kappa = kappa;
  s.delta_star = delta_star;
  const double log_beta = std::abs(std::log(beta));
  s.rho1 = 1.0 / (1.0 + log_beta);
  s.delta_check = delta_star / (1.0 + log_beta);
  s.rho2 = s.delta_check * s.rho1;
  s.m = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(log_beta / s.rho1)));
  s.ell = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(kappa * static_cast<double>(s.m))));
  s.k_star = s.ell + s.m;
  s.alpha2 = beta * std::pow(1.0 - s.rho2, static_cast<double>(s.k_star)) / (1.0 + beta);
  s.a_beta = std::log((1.0 - s.alpha2) / (s.rho2 * s.alpha2));
  return s;
}

Alpha1Result class_alpha1(double beta, std::size_t m, double rho1) {
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
  if (!(rho1 > 0.0 && rho1 < 1.0)) throw ParameterError("rho1 must lie in (0, 1)");
  Alpha1Result r;
  r.alpha1 = beta + std::pow(1.0 - rho1, static_cast<double>(m) + 1.0);
  r.m0 = std::abs(std::log1p(-beta)) / std::abs(std::log1p(-rho1)) - 1.0;
  r.exceeds_m0 = static_cast<double>(m) > r.m0;
  return r;
}

}  // namespace quickdetect
