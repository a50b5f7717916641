#include "quickdetect/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "quickdetect/errors.hpp"

namespace quickdetect {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"family", "coefficients", "mean", "a0", "q0", "q1", "initial"}},
      {"grid", {"points", "weights"}},
      {"rules", {"units", "wsr_thresholds", "sr_threshold"}},
      {"experiment",
       {"thetas", "change_points", "moments", "lcpfa_span", "lcpfa_window", "replications", "seed", "threads",
        "delay_cap"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ": " + key + ": " + what);
  }

  std::optional<std::string> raw(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    std::string s = boost::trim_copy(*v);
    return s;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
  }

  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) fail(key, "required key is missing");
    return *v;
  }

  double number(const std::string& key, const std::string& token) const {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size() || !std::isfinite(value)) fail(key, "'" + token + "' is not a finite number");
    return value;
  }

  std::size_t count(const std::string& key, const std::string& token) const {
    return whole(key, number(key, token));
  }

  std::size_t whole(const std::string& key, double v) const {
    if (v < 0.0 || v != std::floor(v) || v > 1e15) fail(key, std::to_string(v) + " is not a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> numbers(const std::string& key, const std::string& value) const {
    std::vector<std::string> tokens;
    boost::split(tokens, value, boost::is_any_of(", \t"), boost::token_compress_on);
    std::vector<double> out;
    for (auto& t : tokens)
      if (!t.empty()) out.push_back(number(key, t));
    return out;
  }

  // Points separated by '|', components by commas.
  std::vector<Vector> vectors(const std::string& key, const std::string& value) const {
    std::vector<std::string> groups;
    boost::split(groups, value, boost::is_any_of("|"));
    std::vector<Vector> out;
    for (auto& g : groups) {
      const auto comps = numbers(key, g);
      if (comps.empty()) fail(key, "empty point");
      out.push_back(Eigen::Map<const Vector>(comps.data(), static_cast<Eigen::Index>(comps.size())));
    }
    return out;
  }

  // A single '|'-free list of scalars is read as scalar points when the
  // parameter dimension is one.
  std::vector<Vector> points(const std::string& key, const std::string& value, std::size_t dim) const {
    if (dim == 1 && value.find('|') == std::string::npos) {
      std::vector<Vector> out;
      for (double v : numbers(key, value)) out.push_back(make_theta(v));
      return out;
    }
    auto out = vectors(key, value);
    for (std::size_t j = 0; j < out.size(); ++j)
      if (static_cast<std::size_t>(out[j].size()) != dim)
        fail(key, "point " + std::to_string(j) + " has " + std::to_string(out[j].size()) +
                      " components, the model expects " + std::to_string(dim));
    return out;
  }

 private:
  const pt::ptree& tree_;
  std::string source_;
};

Matrix square_from(const Reader& r, const std::string& key, const std::vector<double>& values, std::size_t dim) {
  if (values.size() != dim * dim)
    r.fail(key, "expected " + std::to_string(dim * dim) + " row-major entries, got " + std::to_string(values.size()));
  return unflatten_square(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

std::shared_ptr<const ChangeModel> build_model(const Reader& r) {
  const std::string family = r.required("model.family");
  try {
    if (family == "ar") {
      const auto coeffs = r.numbers("model.coefficients", r.text("model.coefficients", "0"));
      if (coeffs.empty()) r.fail("model.coefficients", "at least one coefficient is required");
      return std::make_shared<ArGaussianModel>(
          Eigen::Map<const Vector>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())));
    }
    if (family == "iid-gaussian-shift") {
      return std::make_shared<IidGaussianShiftModel>(r.number("model.mean", r.text("model.mean", "0")));
    }
    if (family == "mv-linear") {
      const auto a0 = r.numbers("model.a0", r.required("model.a0"));
      const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(a0.size()))));
      if (dim == 0 || dim * dim != a0.size()) r.fail("model.a0", "entry count is not a perfect square");
      const auto q0 = r.numbers("model.q0", r.required("model.q0"));
      const auto q1 = r.numbers("model.q1", r.required("model.q1"));
      return std::make_shared<MvLinearModel>(square_from(r, "model.a0", a0, dim), square_from(r, "model.q0", q0, dim),
                                             square_from(r, "model.q1", q1, dim * dim));
    }
  } catch (const ParameterError& e) {
    r.fail("model", e.what());
  }
  r.fail("model.family", "unknown family '" + family + "' (expected ar, iid-gaussian-shift or mv-linear)");
}

void check_schema(const pt::ptree& tree, const Reader& r) {
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) r.fail("[" + section + "]", "unknown section");
    if (!body.data().empty() && body.empty()) r.fail(section, "expected a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) r.fail(section + "." + key, "unknown key");
  }
}

// The INI reader drops sections without keys; a bare [grid] still has to be seen.
bool declares_section(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (boost::trim_copy(line) == "[" + name + "]") return true;
  return false;
}

}  // namespace

const ParameterGrid& ExperimentConfig::parameter_grid() const {
  if (!grid) throw ConfigError(source_name + ": grid: no grid configured");
  return *grid;
}

StoppingRule ExperimentConfig::wsr_rule(std::size_t theta_index) const {
  if (theta_index >= wsr_thresholds.size())
    throw ConfigError(source_name + ": rules.wsr_thresholds: no threshold for theta #" + std::to_string(theta_index));
  return StoppingRule::wsr(parameter_grid(), wsr_thresholds[theta_index]);
}

StoppingRule ExperimentConfig::sr_rule(std::size_t theta_index) const {
  if (!sr_threshold) throw ConfigError(source_name + ": rules.sr_threshold: not configured");
  if (theta_index >= thetas.size())
    throw ConfigError(source_name + ": experiment.thetas: no theta #" + std::to_string(theta_index));
  return StoppingRule::sr(thetas[theta_index], *sr_threshold);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const Reader r(tree, source_name);
  check_schema(tree, r);

  ExperimentConfig cfg;
  cfg.source_text = text;
  cfg.source_name = source_name;
  cfg.model = build_model(r);
  const std::size_t dim = cfg.model->param_dim();

  const std::string initial = r.text("model.initial", "zero");
  if (initial == "zero")
    cfg.mc.initial = InitialState::Zero;
  else if (initial == "stationary")
    cfg.mc.initial = InitialState::Stationary;
  else
    r.fail("model.initial", "expected zero or stationary, got '" + initial + "'");

  if (auto points_text = r.raw("grid.points")) {
    auto points = r.points("grid.points", *points_text, dim);
    if (points.empty()) r.fail("grid.points", "grid is empty");
    const std::string weights_text = r.text("grid.weights", "uniform");
    try {
      if (weights_text == "uniform") {
        cfg.grid = ParameterGrid::uniform(std::move(points));
      } else {
        auto weights = r.numbers("grid.weights", weights_text);
        if (weights.size() != points.size())
          r.fail("grid.weights", std::to_string(weights.size()) + " weights for " + std::to_string(points.size()) +
                                     " points");
        cfg.grid.emplace(std::move(points), std::move(weights));
      }
      cfg.grid->validate_against(*cfg.model);
    } catch (const ParameterError& e) {
      r.fail("grid", e.what());
    }
  } else if (tree.get_child_optional("grid") || declares_section(text, "grid")) {
    r.fail("grid.points", "grid is empty");
  }

  if (auto thetas_text = r.raw("experiment.thetas")) {
    cfg.thetas = r.points("experiment.thetas", *thetas_text, dim);
    for (std::size_t j = 0; j < cfg.thetas.size(); ++j) {
      try {
        cfg.model->check_admissible(cfg.thetas[j]);
      } catch (const ParameterError& e) {
        r.fail("experiment.thetas", "theta #" + std::to_string(j) + ": " + e.what());
      }
    }
  }

  const std::string units = r.text("rules.units", "nats");
  if (units != "nats" && units != "exp") r.fail("rules.units", "expected nats or exp, got '" + units + "'");
  auto to_nats = [&](const std::string& key, double v) {
    if (units == "nats") return v;
    if (!(v > 0.0)) r.fail(key, "exp-scale thresholds must be positive");
    return std::log(v);
  };
  if (auto t = r.raw("rules.wsr_thresholds")) {
    for (double v : r.numbers("rules.wsr_thresholds", *t)) cfg.wsr_thresholds.push_back(to_nats("rules.wsr_thresholds", v));
    if (cfg.wsr_thresholds.size() == 1 && cfg.thetas.size() > 1)
      cfg.wsr_thresholds.assign(cfg.thetas.size(), cfg.wsr_thresholds.front());
    if (!cfg.thetas.empty() && cfg.wsr_thresholds.size() != cfg.thetas.size())
      r.fail("rules.wsr_thresholds", std::to_string(cfg.wsr_thresholds.size()) + " thresholds for " +
                                         std::to_string(cfg.thetas.size()) + " thetas");
  }
  if (auto t = r.raw("rules.sr_threshold")) cfg.sr_threshold = to_nats("rules.sr_threshold", r.number("rules.sr_threshold", *t));

  for (double v : r.numbers("experiment.change_points", r.text("experiment.change_points", "0")))
    cfg.change_points.push_back(r.whole("experiment.change_points", v));
  cfg.moments = r.numbers("experiment.moments", r.text("experiment.moments", "1"));
  for (double m : cfg.moments)
    if (!(m >= 1.0)) r.fail("experiment.moments", "moment orders must be at least 1");

  cfg.lcpfa_span = r.count("experiment.lcpfa_span", r.text("experiment.lcpfa_span", "25"));
  cfg.lcpfa_window = r.count("experiment.lcpfa_window", r.text("experiment.lcpfa_window", "25"));
  if (cfg.lcpfa_span < 1) r.fail("experiment.lcpfa_span", "must be at least 1");
  if (cfg.lcpfa_window < 1) r.fail("experiment.lcpfa_window", "must be at least 1");

  cfg.mc.replications = r.count("experiment.replications", r.text("experiment.replications", "100000"));
  if (cfg.mc.replications < kMinReplications)
    r.fail("experiment.replications", "must be at least " + std::to_string(kMinReplications));
  const std::string seed_text = r.text("experiment.seed", "1");
  try {
    std::size_t used = 0;
    cfg.mc.seed = std::stoull(seed_text, &used);
    if (used != seed_text.size() || seed_text.find('-') != std::string::npos) throw std::invalid_argument(seed_text);
  } catch (const std::exception&) {
    r.fail("experiment.seed", "'" + seed_text + "' is not an unsigned 64-bit integer");
  }
  cfg.mc.threads = static_cast<unsigned>(r.count("experiment.threads", r.text("experiment.threads", "0")));
  cfg.mc.delay_cap = r.count("experiment.delay_cap", r.text("experiment.delay_cap", "0"));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace quickdetect
