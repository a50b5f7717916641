#include "quickdetect/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "quickdetect/errors.hpp"
#include "quickdetect/info.hpp"

namespace quickdetect {

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ')';
  return os.str();
}

void require_size(const Vector& theta, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(theta.size()) != expected)
    throw ParameterError(std::string(what) + " parameter must have " + std::to_string(expected) +
                         " entries, got " + std::to_string(theta.size()));
}

// Second-moment operator of X_n = (A + B_n) X_{n-1} + w_n acting on
// row-major vec(E[X X^T]): entry ((i,j),(k,l)) = A_ik A_jl + E[B_ik B_jl].
Matrix second_moment_operator(const Matrix& a, const Matrix& q1) {
  const auto p = a.rows();
  Matrix op = kronecker(a, a);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index l = 0; l < p; ++l) op(i * p + j, k * p + l) += q1(i * p + k, j * p + l);
  return op;
}

Matrix checked_cholesky(const Matrix& m, const char* name) {
  if (!is_symmetric(m)) throw ParameterError(std::string(name) + " must be symmetric");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw ParameterError(std::string(name) + " must be positive definite");
  return llt.matrixL();
}

}  // namespace

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::IidGaussianShift: return "iid-gaussian-shift";
    case ModelFamily::ArGaussian: return "ar-p-gaussian";
    case ModelFamily::MvLinearRandomCoeff: return "mv-linear-random-coeff";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// History

History::History(std::size_t order, std::size_t obs_dim)
    : order_(order), obs_dim_(obs_dim), data_(order * obs_dim, 0.0) {}

void History::push(std::span<const double> observation) {
  if (order_ == 0) return;
  // Shift older entries back by one observation, then write the newest first.
  std::copy_backward(data_.begin(), data_.end() - static_cast<std::ptrdiff_t>(obs_dim_), data_.end());
  std::copy_n(observation.begin(), obs_dim_, data_.begin());
}

void History::assign(std::span<const double> state) {
  if (state.size() != data_.size())
    throw StateError("history needs " + std::to_string(data_.size()) + " values, got " +
                     std::to_string(state.size()));
  std::copy(state.begin(), state.end(), data_.begin());
}

// ---------------------------------------------------------------------------
// ChangeModel defaults

void ChangeModel::llr_batch(std::span<const Vector> thetas, std::span<const double> x_new,
                            std::span<const double> state, std::span<double> out) const {
  for (std::size_t j = 0; j < thetas.size(); ++j) out[j] = llr(thetas[j], x_new, state);
}

void ChangeModel::initial_state(InitialState, RandomStream&, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

// ---------------------------------------------------------------------------
// IidGaussianShiftModel

IidGaussianShiftModel::IidGaussianShiftModel(double mean0) : mean0_(make_theta(mean0)) {
  if (!std::isfinite(mean0)) throw ParameterError("pre-change mean must be finite");
}

void IidGaussianShiftModel::check_admissible(const Vector& theta) const {
  require_size(theta, 1, "iid-gaussian-shift");
  if (!std::isfinite(theta(0))) throw ParameterError("post-change mean must be finite");
  if (theta(0) == mean0_(0))
    throw ParameterError("post-change mean equals the pre-change mean " + format_number(theta(0)));
}

void IidGaussianShiftModel::sample(std::span<const double>, const SampleContext& ctx,
                                   RandomStream& rng, std::span<double> out) const {
  const double mu = ctx.post_theta ? (*ctx.post_theta)(0) : mean0_(0);
  out[0] = mu + rng.gaussian();
}

double IidGaussianShiftModel::llr(const Vector& theta, std::span<const double> x_new,
                                  std::span<const double>) const {
  const double mu0 = mean0_(0);
  const double mu1 = theta(0);
  return (mu1 - mu0) * x_new[0] - (mu1 * mu1 - mu0 * mu0) / 2.0;
}

std::string IidGaussianShiftModel::describe() const {
  return "iid-gaussian-shift(mean0=" + format_number(mean0_(0)) + ")";
}

// ---------------------------------------------------------------------------
// ArGaussianModel

ArGaussianModel::ArGaussianModel(Vector a) : a_(std::move(a)) {
  if (a_.size() == 0) throw ParameterError("AR order must be at least 1");
  if (!a_.allFinite()) throw ParameterError("AR coefficients must be finite");
  const double rho = spectral_radius(companion_matrix(a_));
  if (rho >= 1.0)
    throw InstabilityError("AR spectral radius " + format_number(rho) + " >= 1 for coefficients " +
                           format_vector(a_));
  const auto p = a_.size();
  Matrix b = Matrix::Zero(p, p);
  b(0, 0) = 1.0;
  const Matrix f = solve_stationary_covariance(companion_matrix(a_), b);
  Eigen::LLT<Matrix> llt(f);
  if (llt.info() != Eigen::Success) throw ParameterError("AR stationary covariance is not positive definite");
  stationary_chol_ = llt.matrixL();
}

void ArGaussianModel::check_admissible(const Vector& theta) const {
  require_size(theta, order(), "AR");
  if (!theta.allFinite()) throw ParameterError("AR coefficients must be finite");
  const double rho = spectral_radius(companion_matrix(theta));
  if (rho >= 1.0)
    throw InstabilityError("AR spectral radius " + format_number(rho) + " >= 1 for theta " +
                           format_vector(theta));
  if (theta == a_)
    throw ParameterError("post-change parameter " + format_vector(theta) +
                         " equals the pre-change parameter");
}

void ArGaussianModel::sample(std::span<const double> state, const SampleContext& ctx,
                             RandomStream& rng, std::span<double> out) const {
  const Vector& coef = ctx.post_theta ? *ctx.post_theta : a_;
  double mean = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) mean += coef(static_cast<Eigen::Index>(i)) * state[i];
  out[0] = mean + rng.gaussian();
}

double ArGaussianModel::llr(const Vector& theta, std::span<const double> x_new,
                            std::span<const double> state) const {
  double tx = 0.0;
  double ax = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    tx += theta(k) * state[i];
    ax += a_(k) * state[i];
  }
  return x_new[0] * (tx - ax) + (ax * ax - tx * tx) / 2.0;
}

void ArGaussianModel::initial_state(InitialState mode, RandomStream& rng, std::span<double> out) const {
  if (mode == InitialState::Zero) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const auto p = a_.size();
  Vector z(p);
  for (Eigen::Index i = 0; i < p; ++i) z(i) = rng.gaussian();
  const Vector x = stationary_chol_ * z;
  std::copy(x.data(), x.data() + p, out.begin());
}

std::string ArGaussianModel::describe() const { return "ar-p-gaussian(a=" + format_vector(a_) + ")"; }

// ---------------------------------------------------------------------------
// MvLinearModel

MvLinearModel::MvLinearModel(Matrix a0, Matrix q0, Matrix q1)
    : dim_(static_cast<std::size_t>(a0.rows())), a0_(std::move(a0)), q0_(std::move(q0)), q1_(std::move(q1)) {
  const auto p = static_cast<Eigen::Index>(dim_);
  if (p == 0 || a0_.cols() != p) throw ParameterError("A0 must be a non-empty square matrix");
  if (q0_.rows() != p || q0_.cols() != p) throw ParameterError("Q0 must be p x p");
  if (q1_.rows() != p * p || q1_.cols() != p * p) throw ParameterError("Q1 must be p^2 x p^2");
  q0_chol_ = checked_cholesky(q0_, "Q0");
  q1_chol_ = checked_cholesky(q1_, "Q1");
  a0_flat_ = flatten_row_major(a0_);
  const double rho = spectral_radius(second_moment_operator(a0_, q1_));
  if (rho >= 1.0)
    throw InstabilityError("mv-linear pre-change second-moment spectral radius " + format_number(rho) +
                           " >= 1");
}

void MvLinearModel::check_admissible(const Vector& theta) const {
  require_size(theta, param_dim(), "mv-linear");
  if (!theta.allFinite()) throw ParameterError("mv-linear parameter must be finite");
  const double rho = spectral_radius(second_moment_operator(unflatten_square(theta), q1_));
  if (rho >= 1.0)
    throw InstabilityError("mv-linear post-change second-moment spectral radius " + format_number(rho) +
                           " >= 1 for theta " + format_vector(theta));
  if (theta == a0_flat_)
    throw ParameterError("post-change parameter equals the pre-change matrix A0");
}

Matrix MvLinearModel::conditional_covariance(std::span<const double> x) const {
  const auto p = static_cast<Eigen::Index>(dim_);
  Matrix g = q0_;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index l = 0; l < p; ++l)
          s += q1_(i * p + k, j * p + l) * x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(l)];
      g(i, j) += s;
    }
  return g;
}

void MvLinearModel::sample(std::span<const double> state, const SampleContext& ctx, RandomStream& rng,
                           std::span<double> out) const {
  const auto p = static_cast<Eigen::Index>(dim_);
  const Vector& coef = ctx.post_theta ? *ctx.post_theta : a0_flat_;
  Vector z(p * p);
  for (Eigen::Index i = 0; i < p * p; ++i) z(i) = rng.gaussian();
  const Vector b = q1_chol_ * z;  // row-major vec(B_n)
  Vector w(p);
  for (Eigen::Index i = 0; i < p; ++i) w(i) = rng.gaussian();
  const Vector noise = q0_chol_ * w;
  for (Eigen::Index i = 0; i < p; ++i) {
    double s = noise(i);
    for (Eigen::Index k = 0; k < p; ++k)
      s += (coef(i * p + k) + b(i * p + k)) * state[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = s;
  }
}

double MvLinearModel::llr(const Vector& theta, std::span<const double> x_new,
                          std::span<const double> state) const {
  double out = 0.0;
  llr_batch(std::span<const Vector>(&theta, 1), x_new, state, std::span<double>(&out, 1));
  return out;
}

void MvLinearModel::llr_batch(std::span<const Vector> thetas, std::span<const double> x_new,
                              std::span<const double> state, std::span<double> out) const {
  const auto p = static_cast<Eigen::Index>(dim_);
  const Eigen::Map<const Vector> x(state.data(), p);
  const Eigen::Map<const Vector> y(x_new.data(), p);
  const Eigen::LLT<Matrix> g(conditional_covariance(state));
  // g = (|G^{-1/2}(y - A0 x)|^2 - |G^{-1/2}(y - u x)|^2) / 2
  const Vector r0 = y - a0_ * x;
  const double q_pre = g.matrixL().solve(r0).squaredNorm();
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> u(
        thetas[j].data(), p, p);
    const Vector r1 = y - u * x;
    out[j] = (thetas[j] == a0_flat_) ? 0.0 : (q_pre - g.matrixL().solve(r1).squaredNorm()) / 2.0;
  }
}

void MvLinearModel::initial_state(InitialState mode, RandomStream& rng, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (mode == InitialState::Zero) return;
  // The stationary law is not Gaussian; approximate it by a pre-change burn-in.
  std::vector<double> next(dim_);
  for (std::size_t n = 0; n < kStationaryBurnIn; ++n) {
    sample(out, SampleContext{}, rng, next);
    std::copy(next.begin(), next.end(), out.begin());
  }
}

std::string MvLinearModel::describe() const {
  return "mv-linear-random-coeff(p=" + std::to_string(dim_) + ", A0=" + format_vector(a0_flat_) + ")";
}

// ---------------------------------------------------------------------------
// Free functions

double llr_increment(const ChangeModel& model, const Vector& theta, std::span<const double> x_new,
                     std::span<const double> history) {
  if (history.size() < model.state_size())
    throw StateError("history holds " + std::to_string(history.size()) + " values, model needs " +
                     std::to_string(model.state_size()));
  if (x_new.size() != model.obs_dim())
    throw StateError("observation has " + std::to_string(x_new.size()) + " components, model needs " +
                     std::to_string(model.obs_dim()));
  if (static_cast<std::size_t>(theta.size()) != model.param_dim())
    throw ParameterError("parameter has " + std::to_string(theta.size()) + " entries, model needs " +
                         std::to_string(model.param_dim()));
  return model.llr(theta, x_new, history.first(model.state_size()));
}

Vector make_theta(double value) {
  Vector v(1);
  v(0) = value;
  return v;
}

std::span<const double> Path::at(std::size_t n) const {
  return std::span<const double>(values).subspan((n - 1) * obs_dim, obs_dim);
}

PathSampler::PathSampler(const ChangeModel& model, std::optional<std::size_t> change_point,
                         const Vector* post_theta, std::uint64_t seed, InitialState initial)
    : model_(&model),
      change_point_(change_point),
      post_theta_(post_theta),
      rng_(seed),
      history_(model.order(), model.obs_dim()),
      current_(model.obs_dim()) {
  if (change_point_ && !post_theta_) throw ParameterError("a change point needs a post-change parameter");
  std::vector<double> init(model.state_size());
  model.initial_state(initial, rng_, init);
  history_.assign(init);
}

std::span<const double> PathSampler::advance() {
  ++step_;
  SampleContext ctx;
  ctx.step = step_;
  ctx.change_point = change_point_;
  if (change_point_ && step_ > *change_point_) ctx.post_theta = post_theta_;
  model_->sample(history_.state(), ctx, rng_, current_);
  history_.push(current_);
  return current_;
}

PathReplay::PathReplay(const ChangeModel& model, const Path& path)
    : path_(&path), history_(model.order(), model.obs_dim()) {
  if (path.obs_dim != model.obs_dim())
    throw StateError("path has " + std::to_string(path.obs_dim) + " components per observation, model needs " +
                     std::to_string(model.obs_dim()));
  if (path.initial_state.empty()) return;  // zero start
  if (path.initial_state.size() < model.state_size())
    throw StateError("path initial state is shorter than the model order");
  history_.assign(std::span<const double>(path.initial_state).first(model.state_size()));
}

std::span<const double> PathReplay::advance() {
  ++step_;
  const auto x = path_->at(step_);
  history_.push(x);
  return x;
}

Path simulate_path(const ChangeModel& model, const PathSpec& spec) {
  if (spec.horizon < 1) throw ParameterError("path horizon must be at least 1");
  if (spec.change_point) model.check_admissible(spec.true_theta);
  PathSampler sampler(model, spec.change_point, spec.change_point ? &spec.true_theta : nullptr, spec.seed,
                      spec.initial);
  Path path;
  path.obs_dim = model.obs_dim();
  path.initial_state.assign(sampler.state().begin(), sampler.state().end());
  path.values.reserve(spec.horizon * path.obs_dim);
  for (std::size_t n = 0; n < spec.horizon; ++n) {
    const auto x = sampler.advance();
    path.values.insert(path.values.end(), x.begin(), x.end());
  }
  return path;
}

void write_path_csv(std::ostream& out, const Path& path, std::size_t order) {
  out << "index";
  for (std::size_t d = 1; d <= path.obs_dim; ++d) out << ",x" << d;
  out << '\n';
  out << std::setprecision(17);
  const std::size_t init_rows = std::min(order, path.initial_state.size() / std::max<std::size_t>(path.obs_dim, 1));
  for (std::size_t r = init_rows; r-- > 0;) {
    out << -static_cast<long long>(r);
    for (std::size_t d = 0; d < path.obs_dim; ++d) out << ',' << path.initial_state[r * path.obs_dim + d];
    out << '\n';
  }
  for (std::size_t n = 1; n <= path.length(); ++n) {
    out << n;
    for (double v : path.at(n)) out << ',' << v;
    out << '\n';
  }
}

Path read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw StateError("empty path CSV");
  const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (dim == 0 || line.rfind("index", 0) != 0) throw StateError("path CSV header must be index,x1,...");
  Path path;
  path.obs_dim = dim;
  std::map<long long, std::vector<double>> initial;
  long long expected = 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    long long index = 0;
    std::vector<double> values;
    try {
      index = std::stoll(cell);
      while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw StateError("path CSV line " + std::to_string(line_no) + ": malformed number");
    }
    if (values.size() != dim)
      throw StateError("path CSV line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                       " components");
    if (index <= 0) {
      initial[index] = std::move(values);
    } else {
      if (index != expected)
        throw StateError("path CSV line " + std::to_string(line_no) + ": index " + std::to_string(index) +
                         " out of sequence");
      ++expected;
      path.values.insert(path.values.end(), values.begin(), values.end());
    }
  }
  for (auto it = initial.rbegin(); it != initial.rend(); ++it)
    path.initial_state.insert(path.initial_state.end(), it->second.begin(), it->second.end());
  return path;
}

}  // namespace quickdetect
