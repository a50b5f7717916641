#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "quickdetect/config.hpp"
#include "quickdetect/montecarlo.hpp"

namespace quickdetect::cli {

// Column-ordered result rows rendered as CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::ordered_json>> rows;

  std::string to_csv() const;
  // Array of row objects; a single-row table renders as one object.
  nlohmann::ordered_json to_json() const;
};

struct Table1Row {
  Vector theta;
  std::size_t change_point = 0;
  RuleKind rule = RuleKind::Wsr;
  double threshold = 0.0;  // nats
  Estimate add;
  LcpfaEstimate lcpfa;
  double add_app = 0.0;
};

inline constexpr std::size_t kTable1MinReplications = 10000;

// One row per (theta, nu, rule) in config order: thetas outermost, then change
// points, then WSR before SR. LCPFA is estimated once per (theta, rule) and
// repeated across change points. `progress` may be null.
std::vector<Table1Row> compute_table1(const ExperimentConfig& cfg, std::ostream* progress);

// Columns: theta, nu, rule, threshold, exp_threshold, add, add_se,
// add_ci_lower, add_ci_upper, n_used, censor_rate, discard_rate, lcpfa,
// lcpfa_se, lcpfa_argmax_k, add_app.
Table table1_table(const std::vector<Table1Row>& rows);

std::string format_theta(const Vector& theta);

// Entry point shared by main() and the tests. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quickdetect::cli
