#ifndef LSFLOW_EXPERIMENT_HPP
#define LSFLOW_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsflow/flow.hpp"
#include "lsflow/metrics.hpp"
#include "lsflow/network.hpp"
#include "lsflow/problem.hpp"
#include "lsflow/stepsize.hpp"

namespace lsflow {

// Invalid experiment configuration. `where` is a JSON pointer ("/signal/segments/1")
// or "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct SeedSpec {
  std::uint64_t seed = 0;
  double low = -5.0;
  double high = 5.0;
};

// Validated experiment description; `source` keeps the JSON it was read from.
struct ExperimentConfig {
  std::string name;
  LinearEquationProblem problem;
  std::vector<std::string> graph_names;
  SwitchingSignal signal;
  double gain;
  StepSizeSchedule schedule;
  Vector x0;
  std::optional<SeedSpec> x0_seed;
  IntegratorSpec integrator;
  double horizon;
  std::size_t record_points;
  double record_t_min;
  std::optional<std::pair<double, double>> fit_window;
  std::string out_dir;
  bool emit_svg;
  nlohmann::json source;

  FlowSystem system() const { return {problem, signal, gain, schedule}; }
  // Default [horizon/100, horizon].
  std::pair<double, double> slope_window() const;
};

// Throws ConfigError("line L, column C") on a syntax error.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json load_json(const std::filesystem::path& path);

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Uniform draws in [low, high) from mt19937_64; identical on every platform.
Vector seeded_state(const SeedSpec& seed, std::size_t length);

// Built-in problems: le1, le2, le3, rank1.
LinearEquationProblem named_problem(const std::string& name);
// LE.1 with H scaled so that sigma_m(H^T H) / N = 1.
double unit_ratio_scale();

std::vector<std::string> preset_names();
// Also accepts the aliases example1, example2, example3. Throws std::invalid_argument.
nlohmann::json preset(const std::string& name);

struct CheckReport {
  ScenarioClass scenario;
  double dwell_floor = 0.0;
  AssumptionProfile assumptions;
  bool admissible = false;
  SpectralFloors floors;
  double sigma_ratio = 0.0;           // sigma_m(H^T H) / N
  std::vector<double> sigma2;         // per graph, in config order
  std::optional<RatePrediction> rate;
  std::string rate_note;              // why no prediction, when absent
  bool unique_solution = true;
  std::optional<double> rk4_step_limit;

  nlohmann::json to_json(const ExperimentConfig& cfg) const;
  std::string to_text(const ExperimentConfig& cfg) const;
};

CheckReport check(const ExperimentConfig& cfg);

class InadmissibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// In-memory artifacts of a run; file names map to their bytes.
struct RunArtifacts {
  Trajectory trajectory;
  CheckReport report;
  LeastSquaresSet least_squares;
  Vector oracle;
  ErrorSeries consensus;
  ErrorSeries solution;
  ErrorSeries diameter;
  std::optional<ErrorSeries> solution_log_corrected;
  std::optional<SlopeFit> solution_fit;
  std::optional<SlopeFit> log_corrected_fit;
  nlohmann::json manifest;
  std::map<std::string, std::string> files;
};

// Simulates and computes all diagnostics. Throws InadmissibleError unless
// `force` when the step size does not meet the scenario's hypotheses.
RunArtifacts run_experiment(const ExperimentConfig& cfg, bool force = false);
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir);

}  // namespace lsflow

#endif  // LSFLOW_EXPERIMENT_HPP
