#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quickdetect/model.hpp"
#include "quickdetect/montecarlo.hpp"
#include "quickdetect/statistics.hpp"

namespace quickdetect {

// Parsed and validated experiment file. The format is INI with four
// sections; see configs/README.md for the schema. Thresholds are stored in
// nats whatever units the file used.
struct ExperimentConfig {
  std::shared_ptr<const ChangeModel> model;
  std::optional<ParameterGrid> grid;
  std::vector<double> wsr_thresholds;  // one per entry of `thetas`
  std::optional<double> sr_threshold;
  std::vector<Vector> thetas;
  std::vector<std::size_t> change_points;
  std::vector<double> moments;
  std::size_t lcpfa_span = 25;    // ell
  std::size_t lcpfa_window = 25;  // m
  MonteCarloConfig mc;
  std::string source_text;
  std::string source_name;

  const ParameterGrid& parameter_grid() const;
  StoppingRule wsr_rule(std::size_t theta_index) const;
  StoppingRule sr_rule(std::size_t theta_index) const;
};

inline constexpr std::size_t kMinReplications = 100;

// Throws ConfigError naming the line (syntax) or key (schema, invariants).
ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace quickdetect
