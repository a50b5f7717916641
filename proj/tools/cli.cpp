#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "quickdetect/errors.hpp"
#include "quickdetect/info.hpp"
#include "quickdetect/procedures.hpp"

#ifndef QUICKDETECT_VERSION
#define QUICKDETECT_VERSION "unknown"
#endif

namespace quickdetect::cli {

namespace {

using json = nlohmann::ordered_json;

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Vector parse_theta(const std::string& text) {
  std::vector<double> comps;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
    if (used == 0 || used != token.size()) throw ParameterError("'" + text + "' is not a parameter vector");
    comps.push_back(v);
  }
  if (comps.empty()) throw ParameterError("empty parameter vector");
  return Eigen::Map<const Vector>(comps.data(), static_cast<Eigen::Index>(comps.size()));
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  std::string out_dir;
  std::string format;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config,--model", c.config, "Experiment config (INI)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Master seed (overrides the config)");
  sub->add_option("--reps", c.reps, "Replications (overrides the config)");
  sub->add_option("--threads", c.threads, "Worker threads, 0 = all cores (overrides the config)");
  sub->add_option("--out-dir", c.out_dir, "Write results and manifest.json here instead of stdout");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

struct Session {
  Common common;
  std::optional<ExperimentConfig> cfg;
  RunManifest manifest;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  void begin(const std::string& command, int argc, const char* const* argv) {
    manifest.command = command;
    for (int i = 0; i < argc; ++i) manifest.arguments.emplace_back(argv[i]);
    manifest.tool_version = QUICKDETECT_VERSION;
    manifest.started = std::chrono::system_clock::now();
    if (!common.config.empty()) {
      cfg = load_config(common.config);
      if (common.seed) cfg->mc.seed = *common.seed;
      if (common.reps) {
        if (*common.reps < kMinReplications)
          throw ConfigError("--reps: must be at least " + std::to_string(kMinReplications));
        cfg->mc.replications = *common.reps;
      }
      if (common.threads) cfg->mc.threads = *common.threads;
      manifest.config_name = cfg->source_name;
      manifest.config_text = cfg->source_text;
      manifest.seed = cfg->mc.seed;
      manifest.replications = cfg->mc.replications;
      manifest.threads = cfg->mc.threads;
    } else if (common.seed) {
      manifest.seed = *common.seed;
    }
  }

  const ExperimentConfig& config() const {
    if (!cfg) throw ConfigError("this command needs --config");
    return *cfg;
  }

  void warn(const std::vector<std::string>& warnings, const std::string& where) {
    for (const auto& w : warnings) {
      *err << "warning: " << where << ": " << w << '\n';
      manifest.extra["warnings"].push_back(where + ": " + w);
    }
  }

  // Renders `table` in the chosen format, to stdout or to out_dir/<name>.
  void emit(const std::string& name, const Table& table, const std::string& default_format) {
    const std::string format = common.format.empty() ? default_format : common.format;
    const std::string content = format == "json" ? table.to_json().dump(2) + "\n" : table.to_csv();
    if (common.out_dir.empty()) {
      *out << content;
      return;
    }
    write_output(common.out_dir, name + "." + format, content, manifest);
  }

  void finish() {
    manifest.finished = std::chrono::system_clock::now();
    if (!common.out_dir.empty()) write_manifest(common.out_dir, manifest);
  }
};

StoppingRule select_rule(const ExperimentConfig& cfg, const std::string& kind, std::size_t theta_index,
                         std::optional<double> threshold) {
  if (kind == "wsr") {
    if (threshold) return StoppingRule::wsr(cfg.parameter_grid(), *threshold);
    return cfg.wsr_rule(theta_index);
  }
  if (threshold) {
    if (theta_index >= cfg.thetas.size()) throw ConfigError("experiment.thetas: no theta #" + std::to_string(theta_index));
    return StoppingRule::sr(cfg.thetas[theta_index], *threshold);
  }
  return cfg.sr_rule(theta_index);
}

Table estimate_row(const std::vector<std::string>& leading_columns, std::vector<json> leading, const Estimate& e) {
  Table t;
  t.columns = leading_columns;
  for (const char* c : {"estimate", "std_error", "ci_lower", "ci_upper", "n_used", "n_total"}) t.columns.emplace_back(c);
  leading.insert(leading.end(), {number(e.mean), number(e.std_error), number(e.ci95.lower), number(e.ci95.upper),
                                 e.n_used, e.n_total});
  t.rows.push_back(std::move(leading));
  return t;
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

json Table::to_json() const {
  json arr = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < columns.size() && i < row.size(); ++i) obj[columns[i]] = row[i];
    arr.push_back(std::move(obj));
  }
  if (arr.size() == 1) return arr.front();
  return arr;
}

std::string format_theta(const Vector& theta) {
  std::ostringstream out;
  out.precision(15);
  for (Eigen::Index i = 0; i < theta.size(); ++i) out << (i ? ";" : "") << theta[i];
  return out.str();
}

std::vector<Table1Row> compute_table1(const ExperimentConfig& cfg, std::ostream* progress) {
  if (cfg.mc.replications < kTable1MinReplications)
    throw ConfigError("table1 needs at least " + std::to_string(kTable1MinReplications) + " replications");
  if (cfg.thetas.empty()) throw ConfigError(cfg.source_name + ": experiment.thetas: table1 needs thetas");
  std::vector<RuleKind> kinds = {RuleKind::Wsr};
  if (cfg.sr_threshold) kinds.push_back(RuleKind::Sr);

  std::vector<Table1Row> rows;
  for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
    const Vector& theta = cfg.thetas[i];
    const double info = info_number(*cfg.model, theta).value;
    std::vector<StoppingRule> rules;
    std::vector<LcpfaEstimate> lcpfa;
    for (RuleKind kind : kinds) {
      rules.push_back(kind == RuleKind::Wsr ? cfg.wsr_rule(i) : cfg.sr_rule(i));
      lcpfa.push_back(estimate_lcpfa(rules.back(), *cfg.model, cfg.lcpfa_span, cfg.lcpfa_window, cfg.mc));
    }
    for (std::size_t nu : cfg.change_points) {
      for (std::size_t r = 0; r < rules.size(); ++r) {
        Table1Row row;
        row.theta = theta;
        row.change_point = nu;
        row.rule = kinds[r];
        row.threshold = rules[r].threshold();
        row.add = estimate_add(rules[r], *cfg.model, theta, nu, cfg.mc);
        row.lcpfa = lcpfa[r];
        row.add_app = first_order_risk(row.threshold, info);
        if (progress)
          *progress << "theta=" << format_theta(theta) << " nu=" << nu << " " << to_string(row.rule)
                    << " ADD=" << row.add.mean << " (SE " << row.add.std_error << ")\n";
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

Table table1_table(const std::vector<Table1Row>& rows) {
  Table t;
  t.columns = {"theta",   "nu",           "rule",        "threshold", "exp_threshold", "add",
               "add_se",  "add_ci_lower", "add_ci_upper", "n_used",   "censor_rate",   "discard_rate",
               "lcpfa",   "lcpfa_se",     "lcpfa_argmax_k", "add_app"};
  for (const auto& r : rows) {
    t.rows.push_back({format_theta(r.theta), r.change_point, to_string(r.rule), number(r.threshold),
                      number(std::exp(r.threshold)), number(r.add.mean), number(r.add.std_error),
                      number(r.add.ci95.lower), number(r.add.ci95.upper), r.add.n_used, number(r.add.censor_rate),
                      number(r.add.discard_rate), number(r.lcpfa.estimate.mean), number(r.lcpfa.estimate.std_error),
                      r.lcpfa.argmax_k, number(r.add_app)});
  }
  return t;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Shiryaev-Roberts change detection: simulation and operating characteristics", "quickdetect"};
  app.set_version_flag("--version", std::string(QUICKDETECT_VERSION));
  app.require_subcommand(1);

  Session session;
  session.out = &out;
  session.err = &err;
  Common& common = session.common;

  // simulate
  std::string sim_theta;
  std::optional<std::size_t> sim_change;
  std::size_t sim_horizon = 100;
  auto* simulate = app.add_subcommand("simulate", "Simulate one path and print it");
  add_common(simulate, common, true);
  simulate->add_option("--theta", sim_theta, "Post-change parameter (comma-separated components)");
  simulate->add_option("--change-point", sim_change, "Change point nu; omit for no change");
  simulate->add_option("--horizon", sim_horizon, "Number of observations")->check(CLI::PositiveNumber);

  // run
  std::string run_rule_kind = "wsr";
  std::size_t run_theta_index = 0;
  std::optional<double> run_threshold;
  std::string run_input;
  bool run_trace = false;
  auto* run_cmd = app.add_subcommand("run", "Run a stopping rule over one path");
  add_common(run_cmd, common, true);
  run_cmd->add_option("--rule", run_rule_kind)->check(CLI::IsMember({"wsr", "sr"}));
  run_cmd->add_option("--theta-index", run_theta_index, "Row of experiment.thetas for thresholds and SR tuning");
  run_cmd->add_option("--threshold,--a", run_threshold, "Threshold in nats (overrides the config)");
  run_cmd->add_option("--input", run_input, "Path CSV as written by simulate")->check(CLI::ExistingFile);
  run_cmd->add_option("--theta", sim_theta, "Post-change parameter when simulating");
  run_cmd->add_option("--change-point", sim_change, "Change point when simulating");
  run_cmd->add_option("--horizon", sim_horizon, "Horizon when simulating")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--trace", run_trace, "Print the statistic after every observation");

  // schedule
  double sched_beta = 0.01;
  double sched_kappa = 1.0;
  double sched_delta = 0.5;
  auto* schedule = app.add_subcommand("schedule", "Window, span and threshold for an LCPFA bound beta");
  add_common(schedule, common, false);
  schedule->add_option("--beta", sched_beta)->required();
  schedule->add_option("--kappa", sched_kappa);
  schedule->add_option("--delta-star", sched_delta);

  // info
  std::string info_theta;
  std::string info_method = "auto";
  EmpiricalInfoOptions info_opts;
  auto* info = app.add_subcommand("info", "Information number I_theta");
  add_common(info, common, true);
  info->add_option("--theta", info_theta)->required();
  info->add_option("--method", info_method)->check(CLI::IsMember({"auto", "closed-form", "lyapunov", "empirical"}));
  info->add_option("--burn-in", info_opts.burn_in);
  info->add_option("--steps", info_opts.steps);

  // lcpfa
  std::string lc_rule = "wsr";
  std::size_t lc_theta_index = 0;
  std::optional<double> lc_threshold;
  std::optional<std::size_t> lc_ell;
  std::optional<std::size_t> lc_m;
  auto* lcpfa = app.add_subcommand("lcpfa", "Local conditional probability of false alarm");
  add_common(lcpfa, common, true);
  lcpfa->add_option("--rule", lc_rule)->check(CLI::IsMember({"wsr", "sr"}));
  lcpfa->add_option("--theta-index", lc_theta_index);
  lcpfa->add_option("--threshold", lc_threshold, "Threshold in nats");
  lcpfa->add_option("--ell", lc_ell, "Span ell (default: experiment.lcpfa_span)");
  lcpfa->add_option("--m", lc_m, "Window m (default: experiment.lcpfa_window)");

  // pfa
  double pfa_alpha = 0.01;
  double pfa_rho = 0.05;
  std::optional<double> pfa_threshold;
  auto* pfa = app.add_subcommand("pfa", "Weighted PFA under a geometric prior");
  add_common(pfa, common, true);
  pfa->add_option("--alpha", pfa_alpha, "PFA bound used for the default threshold");
  pfa->add_option("--rho", pfa_rho, "Geometric prior parameter")->required();
  pfa->add_option("--threshold", pfa_threshold, "Threshold in nats (default log((1-rho)/(rho alpha)))");

  // calibrate
  double cal_beta = 0.01;
  auto* calibrate = app.add_subcommand("calibrate", "Threshold meeting an LCPFA target");
  add_common(calibrate, common, true);
  calibrate->add_option("--beta", cal_beta)->required();
  calibrate->add_option("--rule", lc_rule)->check(CLI::IsMember({"wsr", "sr"}));
  calibrate->add_option("--theta-index", lc_theta_index, "SR tuning row of experiment.thetas");
  calibrate->add_option("--ell", lc_ell);
  calibrate->add_option("--m", lc_m);

  // table1
  auto* table1 = app.add_subcommand("table1", "ADD and LCPFA of WSR and SR for every configured theta and nu");
  add_common(table1, common, true);

  // diagnose
  std::string diag_theta;
  double diag_eps_frac = 0.1;
  std::vector<std::size_t> diag_ns = {100, 500, 2000};
  std::size_t diag_change = 0;
  bool diag_martingale = false;
  auto* diagnose = app.add_subcommand("diagnose", "SLLN exceedance frequencies or the E_inf[R_n^W] profile");
  add_common(diagnose, common, true);
  diagnose->add_option("--theta", diag_theta, "Parameter for the SLLN diagnostic");
  diagnose->add_option("--epsilon-frac", diag_eps_frac, "Tolerance as a fraction of I_theta");
  diagnose->add_option("--n", diag_ns, "Sample sizes")->delimiter(',');
  diagnose->add_option("--change-point", diag_change);
  diagnose->add_flag("--martingale", diag_martingale, "Estimate E_inf[R_n^W] at each n instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    session.begin(chosen->get_name(), argc, argv);

    if (chosen == simulate) {
      const auto& cfg = session.config();
      PathSpec spec;
      spec.change_point = sim_change;
      spec.horizon = sim_horizon;
      spec.seed = cfg.mc.seed;
      spec.initial = cfg.mc.initial;
      if (sim_change) {
        if (sim_theta.empty()) throw ConfigError("--theta is required with --change-point");
        spec.true_theta = parse_theta(sim_theta);
      }
      const Path path = simulate_path(*cfg.model, spec);
      std::ostringstream csv;
      write_path_csv(csv, path, cfg.model->order());
      const std::string format = common.format.empty() ? "csv" : common.format;
      std::string content = csv.str();
      if (format == "json") {
        json j;
        j["initial_state"] = path.initial_state;
        json obs = json::array();
        for (std::size_t n = 1; n <= path.length(); ++n) {
          auto x = path.at(n);
          obs.push_back(std::vector<double>(x.begin(), x.end()));
        }
        j["observations"] = obs;
        content = j.dump(2) + "\n";
      }
      if (common.out_dir.empty())
        out << content;
      else
        write_output(common.out_dir, "path." + format, content, session.manifest);
    } else if (chosen == run_cmd) {
      const auto& cfg = session.config();
      const StoppingRule rule = select_rule(cfg, run_rule_kind, run_theta_index, run_threshold);
      Path path;
      if (!run_input.empty()) {
        std::ifstream in(run_input);
        path = read_path_csv(in);
      } else {
        PathSpec spec;
        spec.change_point = sim_change;
        spec.horizon = sim_horizon;
        spec.seed = cfg.mc.seed;
        spec.initial = cfg.mc.initial;
        if (sim_change) {
          if (sim_theta.empty()) throw ConfigError("--theta is required with --change-point");
          spec.true_theta = parse_theta(sim_theta);
        }
        path = simulate_path(*cfg.model, spec);
      }
      if (path.obs_dim != cfg.model->obs_dim()) throw ConfigError("input path dimension does not match the model");
      PathReplay replay(*cfg.model, path);
      Table trace;
      trace.columns = {"n", "log_statistic"};
      for (std::size_t j = 0; j < rule.grid().size(); ++j) trace.columns.push_back("log_r_" + std::to_string(j + 1));
      const StopResult stop = run_rule(rule, *cfg.model, replay, path.length(),
                                       [&](std::size_t n, double s, std::span<const double> log_r) {
                                         if (!run_trace) return;
                                         std::vector<json> row = {n, number(s)};
                                         for (double v : log_r) row.push_back(number(v));
                                         trace.rows.push_back(std::move(row));
                                       });
      if (run_trace) session.emit("trace", trace, "csv");
      Table summary;
      summary.columns = {"rule", "threshold", "alarmed", "stop_time", "observations"};
      summary.rows.push_back({to_string(rule.kind()), number(rule.threshold()), stop.alarmed, stop.time, path.length()});
      session.emit("run", summary, run_trace ? "json" : "csv");
    } else if (chosen == schedule) {
      const ScheduleParams s = schedule_from_beta(sched_beta, sched_kappa, sched_delta);
      const Alpha1Result a1 = class_alpha1(sched_beta, s.m, s.rho1);
      Table t;
      t.columns = {"beta", "kappa", "delta_star", "rho1", "delta_check", "rho2", "m", "ell",
                   "k_star", "alpha2", "a_beta", "alpha1", "m0", "m_exceeds_m0"};
      t.rows.push_back({number(s.beta), number(s.kappa), number(s.delta_star), number(s.rho1), number(s.delta_check),
                        number(s.rho2), s.m, s.ell, s.k_star, number(s.alpha2), number(s.a_beta), number(a1.alpha1),
                        number(a1.m0), a1.exceeds_m0});
      session.emit("schedule", t, "json");
    } else if (chosen == info) {
      const auto& cfg = session.config();
      const Vector theta = parse_theta(info_theta);
      info_opts.seed = cfg.mc.seed;
      info_opts.threads = cfg.mc.threads;
      if (common.reps) info_opts.replications = *common.reps;
      InfoResult r;
      if (info_method == "auto") {
        r = info_number(*cfg.model, theta, info_opts);
      } else if (info_method == "empirical") {
        r = info_number_empirical(*cfg.model, theta, info_opts);
      } else if (cfg.model->family() != ModelFamily::ArGaussian) {
        throw ConfigError("--method " + info_method + " needs an AR model");
      } else if (info_method == "lyapunov") {
        r = info_number_ar(theta, cfg.model->pre_params());
      } else {
        if (theta.size() != 1 || cfg.model->pre_params()[0] != 0.0)
          throw ConfigError("the closed form covers AR(1) with a zero pre-change coefficient only");
        r = info_number_ar1_closed_form(theta[0]);
      }
      Table t;
      t.columns = {"theta", "value", "method", "std_error"};
      t.rows.push_back({format_theta(theta), number(r.value), to_string(r.method), number(r.std_error)});
      session.emit("info", t, "json");
    } else if (chosen == lcpfa) {
      const auto& cfg = session.config();
      const StoppingRule rule = select_rule(cfg, lc_rule, lc_theta_index, lc_threshold);
      const std::size_t ell = lc_ell.value_or(cfg.lcpfa_span);
      const std::size_t m = lc_m.value_or(cfg.lcpfa_window);
      const LcpfaEstimate e = estimate_lcpfa(rule, *cfg.model, ell, m, cfg.mc);
      Table t = estimate_row({"rule", "threshold", "ell", "m", "argmax_k"},
                             {to_string(rule.kind()), number(rule.threshold()), ell, m, e.argmax_k}, e.estimate);
      session.emit("lcpfa", t, "csv");
    } else if (chosen == pfa) {
      const auto& cfg = session.config();
      const double a = pfa_threshold.value_or(bayes_threshold(pfa_alpha, GeometricPrior{pfa_rho}));
      const StoppingRule rule = StoppingRule::wsr(cfg.parameter_grid(), a);
      const WeightedPfaEstimate e = estimate_weighted_pfa(rule, *cfg.model, pfa_rho, cfg.mc);
      const double bound = prior_mean(GeometricPrior{pfa_rho}) * std::exp(-a);
      Table t = estimate_row({"rho", "threshold", "bound", "horizon", "tail_bound"},
                             {number(pfa_rho), number(a), number(bound), e.horizon, number(e.tail_bound)}, e.estimate);
      session.emit("pfa", t, "csv");
    } else if (chosen == calibrate) {
      const auto& cfg = session.config();
      const StoppingRule rule = select_rule(cfg, lc_rule, lc_theta_index, 0.0);
      CalibrationTarget target{cal_beta, lc_ell.value_or(cfg.lcpfa_span), lc_m.value_or(cfg.lcpfa_window)};
      const CalibrationResult c = calibrate_threshold(rule, *cfg.model, target, cfg.mc);
      if (!c.converged) err << "warning: calibration stopped without meeting the tolerance\n";
      Table t = estimate_row({"rule", "beta", "ell", "m", "threshold", "exp_threshold", "iterations", "converged"},
                             {to_string(rule.kind()), number(cal_beta), target.ell, target.m, number(c.threshold),
                              number(std::exp(c.threshold)), c.iterations, c.converged},
                             c.achieved.estimate);
      session.emit("calibrate", t, "csv");
    } else if (chosen == table1) {
      const auto rows = compute_table1(session.config(), &err);
      for (const auto& r : rows)
        session.warn(r.add.warnings, "theta=" + format_theta(r.theta) + " nu=" + std::to_string(r.change_point) +
                                         " " + to_string(r.rule));
      session.emit("table1", table1_table(rows), "csv");
    } else if (chosen == diagnose) {
      const auto& cfg = session.config();
      Table t;
      if (diag_martingale) {
        const auto est = statistic_mean_profile(cfg.parameter_grid(), *cfg.model, diag_ns, cfg.mc);
        t.columns = {"n", "mean_statistic", "std_error", "ci_lower", "ci_upper", "z_score"};
        for (std::size_t j = 0; j < diag_ns.size(); ++j) {
          const double n = static_cast<double>(diag_ns[j]);
          t.rows.push_back({diag_ns[j], number(est[j].mean), number(est[j].std_error), number(est[j].ci95.lower),
                            number(est[j].ci95.upper), number((est[j].mean - n) / est[j].std_error)});
        }
      } else {
        if (diag_theta.empty()) throw ConfigError("--theta is required for the SLLN diagnostic");
        const Vector theta = parse_theta(diag_theta);
        const double i_theta = info_number(*cfg.model, theta).value;
        const auto points =
            slln_diagnostic(*cfg.model, theta, diag_change, diag_ns, diag_eps_frac * i_theta, i_theta, cfg.mc);
        t.columns = {"n", "info", "epsilon", "exceedance", "std_error", "ci_lower", "ci_upper"};
        for (const auto& p : points)
          t.rows.push_back({p.n, number(i_theta), number(diag_eps_frac * i_theta), number(p.exceedance.mean),
                            number(p.exceedance.std_error), number(p.exceedance.ci95.lower),
                            number(p.exceedance.ci95.upper)});
      }
      session.emit("diagnose", t, "csv");
    }
    session.finish();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace quickdetect::cli
