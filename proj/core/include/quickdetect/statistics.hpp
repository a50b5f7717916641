#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "quickdetect/linalg.hpp"
#include "quickdetect/model.hpp"

namespace quickdetect {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Finite parameter set with strictly positive mixing weights summing to one.
class ParameterGrid {
 public:
  ParameterGrid(std::vector<Vector> points, std::vector<double> weights);

  static ParameterGrid uniform(std::vector<Vector> points);
  static ParameterGrid uniform_scalar(const std::vector<double>& points);
  static ParameterGrid singleton(Vector point);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t param_dim() const noexcept { return static_cast<std::size_t>(points_.front().size()); }
  std::span<const Vector> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> log_weights() const noexcept { return log_weights_; }

  // Every point must be an admissible post-change parameter of `model`.
  void validate_against(const ChangeModel& model) const;

 private:
  std::vector<Vector> points_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

// log R_n(theta_j) per grid point and the mixed log R_n^W after n updates.
// At n = 0 every entry is kLogZero (R_0 = 0).
struct DetectorState {
  std::vector<double> log_r;
  std::size_t n = 0;
  double log_wsr = kLogZero;
};

// log((1 + R) * L) given log R and log L; log_r_prev may be kLogZero.
inline double sr_update(double log_r_prev, double llr) noexcept {
  if (log_r_prev > 0.0) return log_r_prev + std::log1p(std::exp(-log_r_prev)) + llr;
  return std::log1p(std::exp(log_r_prev)) + llr;
}

// log sum_j w_j exp(log_r[j]) with the max shifted out; kLogZero iff every
// entry is kLogZero. Throws std::invalid_argument on a length mismatch.
double wsr_mix(std::span<const double> log_r, std::span<const double> weights);

// Same as wsr_mix() with precomputed log weights.
double log_mix(std::span<const double> log_r, std::span<const double> log_weights) noexcept;

DetectorState initial_detector_state(const ParameterGrid& grid);

// Advances every log R_n(theta_j) by one observation and re-mixes.
DetectorState step(DetectorState state, const ChangeModel& model, const ParameterGrid& grid,
                   std::span<const double> x_new, std::span<const double> history);

// In-place WSR statistic for streaming use; keeps an LLR scratch buffer so
// updates do not allocate.
class WsrStatistic {
 public:
  explicit WsrStatistic(const ParameterGrid& grid);

  double update(const ChangeModel& model, std::span<const double> x_new, std::span<const double> history);
  void reset();

  double log_value() const noexcept { return state_.log_wsr; }
  const DetectorState& state() const noexcept { return state_; }
  const ParameterGrid& grid() const noexcept { return *grid_; }

 private:
  const ParameterGrid* grid_;
  DetectorState state_;
  std::vector<double> llr_;
};

// SR statistic tuned to a single parameter; no mixing step.
class SrStatistic {
 public:
  explicit SrStatistic(Vector theta) : theta_(std::move(theta)) {}

  double update(const ChangeModel& model, std::span<const double> x_new, std::span<const double> history) {
    log_r_ = sr_update(log_r_, model.llr(theta_, x_new, history));
    ++n_;
    return log_r_;
  }
  void reset() noexcept {
    log_r_ = kLogZero;
    n_ = 0;
  }

  double log_value() const noexcept { return log_r_; }
  std::size_t n() const noexcept { return n_; }
  const Vector& theta() const noexcept { return theta_; }

 private:
  Vector theta_;
  double log_r_ = kLogZero;
  std::size_t n_ = 0;
};

}  // namespace quickdetect
