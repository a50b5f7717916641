#include "quickdetect/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "quickdetect/errors.hpp"

namespace quickdetect {

ParameterGrid::ParameterGrid(std::vector<Vector> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw ParameterError("parameter grid is empty");
  if (weights_.size() != points_.size())
    throw ParameterError("grid has " + std::to_string(points_.size()) + " points but " +
                         std::to_string(weights_.size()) + " weights");
  const auto dim = points_.front().size();
  for (const auto& p : points_)
    if (p.size() != dim || dim == 0) throw ParameterError("grid points must share a non-zero dimension");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("grid weights must be strictly positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ParameterError("grid weights sum to " + std::to_string(total) + ", expected 1");
  log_weights_.reserve(weights_.size());
  for (double w : weights_) log_weights_.push_back(std::log(w));
}

ParameterGrid ParameterGrid::uniform(std::vector<Vector> points) {
  const std::size_t n = points.size();
  if (n == 0) throw ParameterError("parameter grid is empty");
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  // Absorb the rounding residue so the weights sum to one within 1e-12.
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  weights.back() += 1.0 - sum;
  return ParameterGrid(std::move(points), std::move(weights));
}

ParameterGrid ParameterGrid::uniform_scalar(const std::vector<double>& points) {
  std::vector<Vector> pts;
  pts.reserve(points.size());
  for (double p : points) pts.push_back(make_theta(p));
  return uniform(std::move(pts));
}

ParameterGrid ParameterGrid::singleton(Vector point) {
  std::vector<Vector> pts;
  pts.push_back(std::move(point));
  return ParameterGrid(std::move(pts), {1.0});
}

void ParameterGrid::validate_against(const ChangeModel& model) const {
  if (param_dim() != model.param_dim())
    throw ParameterError("grid points have " + std::to_string(param_dim()) + " entries, model needs " +
                         std::to_string(model.param_dim()));
  for (std::size_t j = 0; j < points_.size(); ++j) {
    try {
      model.check_admissible(points_[j]);
    } catch (const ParameterError& e) {
      throw ParameterError("grid point " + std::to_string(j + 1) + ": " + e.what());
    }
  }
}

double log_mix(std::span<const double> log_r, std::span<const double> log_weights) noexcept {
  double top = kLogZero;
  for (std::size_t j = 0; j < log_r.size(); ++j) top = std::max(top, log_weights[j] + log_r[j]);
  if (top == kLogZero) return kLogZero;
  double sum = 0.0;
  for (std::size_t j = 0; j < log_r.size(); ++j) sum += std::exp(log_weights[j] + log_r[j] - top);
  return top + std::log(sum);
}

double wsr_mix(std::span<const double> log_r, std::span<const double> weights) {
  if (log_r.size() != weights.size())
    throw std::invalid_argument("wsr_mix: " + std::to_string(log_r.size()) + " statistics vs " +
                                std::to_string(weights.size()) + " weights");
  std::vector<double> log_w(weights.size());
  std::transform(weights.begin(), weights.end(), log_w.begin(), [](double w) { return std::log(w); });
  return log_mix(log_r, log_w);
}

DetectorState initial_detector_state(const ParameterGrid& grid) {
  DetectorState s;
  s.log_r.assign(grid.size(), kLogZero);
  return s;
}

DetectorState step(DetectorState state, const ChangeModel& model, const ParameterGrid& grid,
                   std::span<const double> x_new, std::span<const double> history) {
  if (state.log_r.size() != grid.size()) throw std::invalid_argument("detector state does not match grid");
  if (history.size() < model.state_size())
    throw StateError("history holds " + std::to_string(history.size()) + " values, model needs " +
                     std::to_string(model.state_size()));
  std::vector<double> llr(grid.size());
  model.llr_batch(grid.points(), x_new, history.first(model.state_size()), llr);
  for (std::size_t j = 0; j < grid.size(); ++j) state.log_r[j] = sr_update(state.log_r[j], llr[j]);
  ++state.n;
  state.log_wsr = log_mix(state.log_r, grid.log_weights());
  return state;
}

WsrStatistic::WsrStatistic(const ParameterGrid& grid)
    : grid_(&grid), state_(initial_detector_state(grid)), llr_(grid.size()) {}

double WsrStatistic::update(const ChangeModel& model, std::span<const double> x_new,
                            std::span<const double> history) {
  model.llr_batch(grid_->points(), x_new, history, llr_);
  for (std::size_t j = 0; j < llr_.size(); ++j) state_.log_r[j] = sr_update(state_.log_r[j], llr_[j]);
  ++state_.n;
  state_.log_wsr = log_mix(state_.log_r, grid_->log_weights());
  return state_.log_wsr;
}

void WsrStatistic::reset() { state_ = initial_detector_state(*grid_); }

}  // namespace quickdetect
