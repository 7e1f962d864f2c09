// lsflow: run, check and analyze distributed least-squares flow experiments.
//
// Exit codes: 0 ok, 1 inadmissible, 2 config/input error, 3 numerical divergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lsflow/experiment.hpp"
#include "lsflow/export.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInadmissible = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct Source {
  std::string config_path;
  std::string preset_name;
};

nlohmann::json load_document(const Source& src) {
  if (!src.config_path.empty() && !src.preset_name.empty()) {
    throw lsflow::ConfigError("command line", "give either --config or --preset, not both");
  }
  if (!src.preset_name.empty()) {
    try {
      return lsflow::preset(src.preset_name);
    } catch (const std::invalid_argument& e) {
      throw lsflow::ConfigError("--preset", e.what());
    }
  }
  if (src.config_path.empty()) throw lsflow::ConfigError("command line", "one of --config or --preset is required");
  return lsflow::load_json(src.config_path);
}

void add_source_options(CLI::App* cmd, Source& src) {
  cmd->add_option("--config", src.config_path, "Experiment config (JSON)");
  cmd->add_option("--preset", src.preset_name, "Built-in experiment name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed least-squares flow simulator"};
  app.require_subcommand(1);

  Source run_src;
  std::string out_dir;
  double horizon = 0.0;
  bool emit_svg = false;
  bool force = false;
  auto* run_cmd = app.add_subcommand("run", "Simulate an experiment and write CSV/JSON/SVG artifacts");
  add_source_options(run_cmd, run_src);
  run_cmd->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
  run_cmd->add_option("--horizon", horizon, "Final time (overrides horizon)")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--emit-svg", emit_svg, "Also write log-log SVG plots");
  run_cmd->add_flag("--force", force, "Run even when the step size is inadmissible for the scenario");

  Source check_src;
  bool check_json = false;
  auto* check_cmd = app.add_subcommand("check", "Classify the scenario and test the step-size hypotheses");
  add_source_options(check_cmd, check_src);
  check_cmd->add_flag("--json", check_json, "Print the report as JSON");

  std::string csv_path;
  double t_lo = 0.0;
  double t_hi = 0.0;
  auto* analyze_cmd = app.add_subcommand("analyze", "Fit a log-log slope to a t,value CSV");
  analyze_cmd->add_option("csv", csv_path, "Error-series CSV")->required();
  analyze_cmd->add_option("--t-lo", t_lo, "Window start (default t_max/100)");
  analyze_cmd->add_option("--t-hi", t_hi, "Window end (default t_max)");

  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "Print a built-in config as JSON (no name: list presets)");
  preset_cmd->add_option("name", preset_name, "Preset name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      nlohmann::json doc = load_document(run_src);
      if (horizon > 0.0) doc["horizon"] = horizon;
      lsflow::ExperimentConfig cfg = lsflow::parse_config(doc);
      if (emit_svg) cfg.emit_svg = true;
      const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
      const lsflow::RunArtifacts artifacts = lsflow::run_experiment(cfg, force);
      lsflow::write_artifacts(artifacts, dir);
      std::cout << artifacts.report.to_text(cfg);
      const auto& term = artifacts.manifest["terminal"];
      std::cout << "terminal t:        " << lsflow::format_number(term["t"].get<double>()) << '\n'
                << "consensus error:   " << lsflow::format_number(term["consensus_error"].get<double>()) << '\n'
                << "solution error:    " << lsflow::format_number(term["solution_error"].get<double>()) << '\n';
      if (artifacts.solution_fit) {
        std::cout << "fitted slope:      " << lsflow::format_number(artifacts.solution_fit->slope) << '\n';
      }
      if (artifacts.log_corrected_fit) {
        std::cout << "log-corr. slope:   " << lsflow::format_number(artifacts.log_corrected_fit->slope) << '\n';
      }
      std::cout << "artifacts:         " << dir << '\n';
      return kExitOk;
    }
    if (*check_cmd) {
      const lsflow::ExperimentConfig cfg = lsflow::parse_config(load_document(check_src));
      const lsflow::CheckReport report = lsflow::check(cfg);
      if (check_json) {
        std::cout << report.to_json(cfg).dump(2) << '\n';
      } else {
        std::cout << report.to_text(cfg);
      }
      return report.admissible ? kExitOk : kExitInadmissible;
    }
    if (*analyze_cmd) {
      std::ifstream in(csv_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot open " << csv_path << '\n';
        return kExitConfig;
      }
      std::ostringstream text;
      text << in.rdbuf();
      const lsflow::ErrorSeries series = lsflow::parse_series_csv(text.str(), csv_path);
      if (series.size() == 0) {
        std::cerr << "error: " << csv_path << " has no samples\n";
        return kExitConfig;
      }
      const double hi = t_hi > 0.0 ? t_hi : series.times.back();
      const double lo = t_lo > 0.0 ? t_lo : hi / 100.0;
      std::cout << lsflow::slope_fit_json(lsflow::fit_loglog_slope(series, lo, hi));
      return kExitOk;
    }
    if (*preset_cmd) {
      if (preset_name.empty()) {
        for (const std::string& name : lsflow::preset_names()) std::cout << name << '\n';
        return kExitOk;
      }
      std::cout << lsflow::preset(preset_name).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const lsflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lsflow::InadmissibleError& e) {
    std::cerr << "inadmissible: " << e.what() << '\n';
    return kExitInadmissible;
  } catch (const lsflow::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const lsflow::InsufficientWindowError& e) {
    std::cerr << "error: " << e.what() << " (need at least " << lsflow::kMinFitSamples
              << " positive samples in the window)\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
