#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quickdetect/linalg.hpp"
#include "quickdetect/rng.hpp"

namespace quickdetect {

enum class ModelFamily { IidGaussianShift, ArGaussian, MvLinearRandomCoeff };

std::string to_string(ModelFamily family);

enum class InitialState {
  Zero,        // X_0 = ... = X_{1-p} = 0
  Stationary,  // drawn from the pre-change stationary law
};

// The `order` most recent observations, newest first, each of `obs_dim`
// components. For AR(p) this is the Markov state (X_{n-1}, ..., X_{n-p}); for
// the multivariate model it is X_{n-1}.
class History {
 public:
  History(std::size_t order, std::size_t obs_dim);

  std::span<const double> state() const noexcept { return data_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t obs_dim() const noexcept { return obs_dim_; }

  void push(std::span<const double> observation);
  void assign(std::span<const double> state);

 private:
  std::size_t order_;
  std::size_t obs_dim_;
  std::vector<double> data_;
};

// Which law generates the next observation. A null `post_theta` selects the
// pre-change law. `step` is the index n of the observation being drawn and
// `change_point` is nu (empty when no change occurs); the shipped Gaussian
// families ignore both.
struct SampleContext {
  const Vector* post_theta = nullptr;
  std::size_t step = 0;
  std::optional<std::size_t> change_point;
};

// Pre/post-change pair of Markov conditional densities. Post-change laws are
// indexed by a parameter vector theta; the pre-change law is fixed. Instances
// are immutable once constructed and may be shared across threads.
class ChangeModel {
 public:
  virtual ~ChangeModel() = default;

  virtual ModelFamily family() const noexcept = 0;
  virtual std::size_t obs_dim() const noexcept = 0;
  // Number of past observations the conditional laws depend on.
  virtual std::size_t order() const noexcept = 0;
  std::size_t state_size() const noexcept { return obs_dim() * order(); }
  virtual std::size_t param_dim() const noexcept = 0;
  virtual const Vector& pre_params() const noexcept = 0;

  // Throws ParameterError (or InstabilityError) if theta cannot be a
  // post-change parameter. The pre-change parameter itself is rejected.
  virtual void check_admissible(const Vector& theta) const = 0;

  virtual void sample(std::span<const double> state, const SampleContext& ctx, RandomStream& rng,
                      std::span<double> out) const = 0;

  // log f_theta(x_new | state) - log psi(x_new | state). Unchecked; see
  // llr_increment() for the validating entry point.
  virtual double llr(const Vector& theta, std::span<const double> x_new,
                     std::span<const double> state) const = 0;

  // Same as llr() for every theta in `thetas`. Families override this when
  // part of the work is shared across parameters.
  virtual void llr_batch(std::span<const Vector> thetas, std::span<const double> x_new,
                         std::span<const double> state, std::span<double> out) const;

  virtual void initial_state(InitialState mode, RandomStream& rng, std::span<double> out) const;

  virtual std::string describe() const = 0;
};

// X_n = mu + w_n with mu = mean0 before the change and theta after.
class IidGaussianShiftModel final : public ChangeModel {
 public:
  explicit IidGaussianShiftModel(double mean0);

  ModelFamily family() const noexcept override { return ModelFamily::IidGaussianShift; }
  std::size_t obs_dim() const noexcept override { return 1; }
  std::size_t order() const noexcept override { return 0; }
  std::size_t param_dim() const noexcept override { return 1; }
  const Vector& pre_params() const noexcept override { return mean0_; }
  void check_admissible(const Vector& theta) const override;
  void sample(std::span<const double> state, const SampleContext& ctx, RandomStream& rng,
              std::span<double> out) const override;
  double llr(const Vector& theta, std::span<const double> x_new,
             std::span<const double> state) const override;
  std::string describe() const override;

 private:
  Vector mean0_;
};

// X_n = a_1 X_{n-1} + ... + a_p X_{n-p} + w_n, w_n ~ N(0,1); the coefficient
// vector switches from `a` to theta after the change.
class ArGaussianModel final : public ChangeModel {
 public:
  explicit ArGaussianModel(Vector a);

  ModelFamily family() const noexcept override { return ModelFamily::ArGaussian; }
  std::size_t obs_dim() const noexcept override { return 1; }
  std::size_t order() const noexcept override { return static_cast<std::size_t>(a_.size()); }
  std::size_t param_dim() const noexcept override { return order(); }
  const Vector& pre_params() const noexcept override { return a_; }
  void check_admissible(const Vector& theta) const override;
  void sample(std::span<const double> state, const SampleContext& ctx, RandomStream& rng,
              std::span<double> out) const override;
  double llr(const Vector& theta, std::span<const double> x_new,
             std::span<const double> state) const override;
  void initial_state(InitialState mode, RandomStream& rng, std::span<double> out) const override;
  std::string describe() const override;

 private:
  Vector a_;
  Matrix stationary_chol_;  // lower factor of the pre-change stationary covariance
};

// X_n = (A + B_n) X_{n-1} + w_n in R^p with A = A0 before the change and
// theta after, w_n ~ N(0, Q0) and vec(B_n) ~ N(0, Q1).
//
// Index convention: Q1 is p^2 x p^2 with Q1(i*p+k, j*p+l) = E[B_ik B_jl]
// (row-major vectorisation of B), and a matrix parameter theta is passed as
// its p^2 entries in row-major order.
class MvLinearModel final : public ChangeModel {
 public:
  MvLinearModel(Matrix a0, Matrix q0, Matrix q1);

  ModelFamily family() const noexcept override { return ModelFamily::MvLinearRandomCoeff; }
  std::size_t obs_dim() const noexcept override { return dim_; }
  std::size_t order() const noexcept override { return 1; }
  std::size_t param_dim() const noexcept override { return dim_ * dim_; }
  const Vector& pre_params() const noexcept override { return a0_flat_; }
  void check_admissible(const Vector& theta) const override;
  void sample(std::span<const double> state, const SampleContext& ctx, RandomStream& rng,
              std::span<double> out) const override;
  double llr(const Vector& theta, std::span<const double> x_new,
             std::span<const double> state) const override;
  void llr_batch(std::span<const Vector> thetas, std::span<const double> x_new,
                 std::span<const double> state, std::span<double> out) const override;
  void initial_state(InitialState mode, RandomStream& rng, std::span<double> out) const override;
  std::string describe() const override;

  const Matrix& a0() const noexcept { return a0_; }
  const Matrix& q0() const noexcept { return q0_; }
  const Matrix& q1() const noexcept { return q1_; }

  // G(x) = E[B x x^T B^T] + Q0, the conditional covariance of X_n given X_{n-1} = x.
  Matrix conditional_covariance(std::span<const double> x) const;

  static constexpr std::size_t kStationaryBurnIn = 1000;

 private:
  std::size_t dim_;
  Matrix a0_;
  Vector a0_flat_;
  Matrix q0_;
  Matrix q1_;
  Matrix q0_chol_;
  Matrix q1_chol_;
};

// Validating wrapper around ChangeModel::llr(): `history` must hold at least
// the model's state_size() values (StateError otherwise).
double llr_increment(const ChangeModel& model, const Vector& theta, std::span<const double> x_new,
                     std::span<const double> history);

Vector make_theta(double value);

struct PathSpec {
  std::optional<std::size_t> change_point;  // empty: no change (nu = infinity)
  Vector true_theta;                        // ignored without a change point
  std::size_t horizon = 1;
  std::uint64_t seed = 0;
  InitialState initial = InitialState::Zero;
};

// A stored trajectory: the initial state (X_0, X_{-1}, ... newest first) and
// observations X_1..X_n laid out contiguously, obs_dim values each.
struct Path {
  std::size_t obs_dim = 1;
  std::vector<double> initial_state;
  std::vector<double> values;

  std::size_t length() const noexcept { return obs_dim == 0 ? 0 : values.size() / obs_dim; }
  std::span<const double> at(std::size_t n) const;  // 1-based, X_n
};

// Streams observations with a change at `change_point`. Draws are identical
// to simulate_path() for the same arguments.
class PathSampler {
 public:
  PathSampler(const ChangeModel& model, std::optional<std::size_t> change_point,
              const Vector* post_theta, std::uint64_t seed,
              InitialState initial = InitialState::Zero);

  std::span<const double> state() const noexcept { return history_.state(); }
  std::size_t step() const noexcept { return step_; }
  // Draws X_{step+1}, records it and returns it.
  std::span<const double> advance();

 private:
  const ChangeModel* model_;
  std::optional<std::size_t> change_point_;
  const Vector* post_theta_;
  RandomStream rng_;
  History history_;
  std::vector<double> current_;
  std::size_t step_ = 0;
};

// Replays a stored Path through the same interface as PathSampler.
class PathReplay {
 public:
  PathReplay(const ChangeModel& model, const Path& path);

  std::span<const double> state() const noexcept { return history_.state(); }
  std::size_t step() const noexcept { return step_; }
  std::size_t remaining() const noexcept { return path_->length() - step_; }
  std::span<const double> advance();

 private:
  const Path* path_;
  History history_;
  std::size_t step_ = 0;
};

Path simulate_path(const ChangeModel& model, const PathSpec& spec);

// CSV with header `index,x1,...,xd`. Initial-state rows carry indices <= 0.
void write_path_csv(std::ostream& out, const Path& path, std::size_t order);
Path read_path_csv(std::istream& in);

}  // namespace quickdetect
