#pragma once

#include "harnack/heat_harnack.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace harnack {

/// Invalid configuration; field() is the dotted key path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct CurveConfig {
  std::string preset = "ellipse";  // circle | ellipse | generic
  double radius = 1.0;
  double a = 2.0;
  double b = 1.0;
  std::vector<double> samples;
  std::size_t M = 256;
};

struct HeatConfig {
  int dim = 2;
  std::vector<heat::PointSource> sources;  // empty: three default sources
  double time_shift = 0.0;
  std::size_t random_tuples = 1000;
};

struct GridConfig {
  double L = 0.0;  // 0: six times the circumradius
  std::size_t resolution = 201;
  std::string format = "bin";  // bin | csv
};

struct FlowConfig {
  double dt = 1e-5;
  double t_end = 0.0;  // 0: 0.9 of the extinction time
};

struct Tolerances {
  double heat_equality = 1e-6;
  double heat_positivity = 1e-6;
  double classical = 1e-10;
  double sharpness = 1e-12;
  double circle_radius = 1e-4;
  double area_rate = 1e-3;
  double identity_factor = 10.0;
  double circle_Z = 1e-4;
  double path_relative = 0.01;
  double sigma_spread = 0.03;
  double sigma_final = 0.02;
  double residual_ratio = 2.0;
  double radial_residual = 1e-6;
};

struct ExperimentConfig {
  std::string experiment = "all";  // heat | csf | expander | chain | all
  CurveConfig curve;
  HeatConfig heat;
  std::vector<double> N_sequence;  // empty: per-suite defaults
  std::vector<double> limit_N = {2, 5, 10, 20};
  std::vector<double> sigma_N = {10, 20, 50, 100};
  GridConfig grid;
  FlowConfig flow;
  Tolerances tolerances;
  std::string output = "harnack_out";
  std::uint64_t seed = 20240601;
  bool stable_output = false;
};

/// Parses and validates; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

/// "(-1,1);(1,1)" or "(x,y,w);..." into point sources; the last number of
/// each tuple is the weight. Returns the dimension through `dim`.
std::vector<heat::PointSource> parse_sources(const std::string& text, int& dim);
std::vector<double> parse_list(const std::string& text);

struct CheckResult {
  std::string name;
  std::string anchor;
  double margin = 0.0;
  double budget = 0.0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool pass() const;
};

struct RunResult {
  std::vector<SuiteResult> suites;
  nlohmann::json report;
  bool pass = false;
  const CheckResult* first_failure() const;
};

SuiteResult run_heat_suite(const ExperimentConfig& c, const std::string& out_dir);
SuiteResult run_csf_suite(const ExperimentConfig& c, const std::string& out_dir);
SuiteResult run_expander_suite(const ExperimentConfig& c, const std::string& out_dir);
SuiteResult run_chain_suite(const ExperimentConfig& c, const std::string& out_dir);

/// Runs the selected suites, writes report.json, CSVs and grid fields into
/// c.output. Numerical exceptions become failed checks.
RunResult run_experiment(const ExperimentConfig& c);

}  // namespace harnack
