#include <doctest.h>

#include <cstdlib>

#include "lsflow/experiment.hpp"
#include "lsflow/export.hpp"

using namespace lsflow;
using nlohmann::json;

namespace {

std::string error_location(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "no error";
}

json short_run(const std::string& name, double horizon) {
  json doc = preset(name);
  doc["horizon"] = horizon;
  doc["record"]["points"] = 40;
  return doc;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("every preset parses and is admissible") {
    for (const std::string& name : preset_names()) {
      CAPTURE(name);
      const ExperimentConfig cfg = parse_config(preset(name));
      CHECK(cfg.name == name);
      CHECK(check(cfg).admissible);
      CHECK(cfg.gain == 100.0);
    }
    CHECK(preset("example3")["name"] == "example3-x0a");
    CHECK_THROWS_AS(preset("example9"), std::invalid_argument);
  }

  TEST_CASE("preset contents") {
    const ExperimentConfig le2 = parse_config(preset("example1-le2"));
    CHECK((le2.problem.H() - Matrix::from_rows({{2, 7}, {6, 5}, {-11, 1}, {1, 0}})).max_abs() == 0.0);
    CHECK(le2.problem.z() == Vector{1, 3, 2, -1});

    const ExperimentConfig x0a = parse_config(preset("example3-x0a"));
    CHECK(x0a.x0 == Vector{3.5, 4, 5, -4, -4, 3, -2, -3.4, -5, 4.5});
    const ExperimentConfig x0b = parse_config(preset("example3-x0b"));
    CHECK(x0b.x0 == Vector{-2, 1.25, -3, 2, 1, 3, 1.3, 0.8, -0.8, 3.5});

    const ExperimentConfig ex4 = parse_config(preset("example4"));
    CHECK(ex4.graph_names == std::vector<std::string>{"G3", "G4"});
    REQUIRE(ex4.signal.segments().size() == 2);
    CHECK(ex4.signal.segments()[0].duration == 0.1);
    CHECK(ex4.signal.segments()[1].duration == 0.1);
    CHECK(ex4.signal.periodic());
    CHECK(ex4.x0 == x0a.x0);

    const ExperimentConfig l025 = parse_config(preset("example2-l025"));
    CHECK(l025.horizon == 1e5);
    CHECK(l025.schedule.lambda() == 0.25);
  }

  TEST_CASE("check reports") {
    const CheckReport r1 = check(parse_config(preset("example1-le1")));
    CHECK(r1.scenario.kind == ScenarioKind::FixedConnected);
    CHECK(r1.admissible);
    const CheckReport r4 = check(parse_config(preset("example4")));
    CHECK(r4.scenario.kind == ScenarioKind::UniformlyJointlyConnected);
    CHECK(r4.scenario.window == doctest::Approx(0.2));
    CHECK(r4.admissible);
    CHECK_FALSE(r4.rate.has_value());

    json constant = preset("example1-le1");
    constant["stepsize"] = {{"kind", "constant"}, {"c", 0.2}};
    const CheckReport rc = check(parse_config(constant));
    CHECK_FALSE(rc.admissible);
    CHECK_FALSE(rc.assumptions.vanishing);
  }

  TEST_CASE("manifest rate prediction agrees with predict_rate") {
    for (const char* name : {"example1-le1", "example1-le2", "example1-le3", "example2-l05"}) {
      CAPTURE(name);
      const ExperimentConfig cfg = parse_config(short_run(name, 20.0));
      const RunArtifacts a = run_experiment(cfg);
      const RatePrediction r = predict_rate(cfg.problem, cfg.schedule);
      CHECK(a.manifest["check"]["rate_prediction"]["regime"] == to_string(r.regime));
      CHECK(a.manifest["check"]["rate_prediction"]["exponent"].get<double>() == r.exponent);
    }
  }

  TEST_CASE("switching signal with lambda = 0.25 needs force") {
    json doc = short_run("example3-x0a", 5.0);
    doc["stepsize"]["lambda"] = 0.25;
    const ExperimentConfig cfg = parse_config(doc);
    CHECK_THROWS_AS(run_experiment(cfg), InadmissibleError);
    CHECK_NOTHROW(run_experiment(cfg, true));
  }

  TEST_CASE("config errors carry a location") {
    CHECK(error_location("{\"name\": 1,\n  \"K\": }") == "line 2, column 8");
    json doc = preset("example3-x0a");
    doc["signal"]["segments"][1]["duration"] = -0.1;
    CHECK(error_location(doc.dump()) == "/signal/segments/1/duration");
    doc = preset("example1-le1");
    doc["stepsize"]["colour"] = 1;
    CHECK(error_location(doc.dump()) == "/stepsize/colour");
    doc = preset("example1-le1");
    doc["x0"] = json::array({1, 2, 3});
    CHECK(error_location(doc.dump()) == "/x0");
    doc = preset("example1-le1");
    doc.erase("horizon");
    CHECK(error_location(doc.dump()) == "/");
    doc = preset("example1-le1");
    doc["integrator"] = {{"method", "rk4"}, {"h", 0.1}};
    CHECK(error_location(doc.dump()) == "/integrator/h");
    doc = preset("example1-le1");
    doc["graphs"][0]["edges"] = json::array({json::array({1, 1})});
    doc["graphs"][0].erase("topology");
    CHECK(error_location(doc.dump()).rfind("/graphs/0", 0) == 0);
    doc = preset("example3-x0a");
    doc["signal"]["segments"][0]["graph"] = "G9";
    CHECK(error_location(doc.dump()) == "/signal/segments/0/graph");
  }

  TEST_CASE("seeded_state is reproducible and in range") {
    const SeedSpec s{20190601, -5.0, 5.0};
    const Vector a = seeded_state(s, 8), b = seeded_state(s, 8);
    CHECK(a == b);
    for (double v : a) {
      CHECK(v >= -5.0);
      CHECK(v < 5.0);
    }
    CHECK(seeded_state({1, -5.0, 5.0}, 8) != a);
    CHECK(parse_config(preset("example1-le1")).x0 == a);
  }

  TEST_CASE("CSV and JSON formats") {
    const RunArtifacts a = run_experiment(parse_config(short_run("example3-x0a", 2.0)));
    const std::string& traj = a.files.at("trajectory.csv");
    CHECK(traj.rfind("t,x_1_1,x_1_2,x_2_1,x_2_2,x_3_1,x_3_2,x_4_1,x_4_2,x_5_1,x_5_2\n0,3.5,4,5,-4,", 0) == 0);
    CHECK(traj.find('\r') == std::string::npos);
    CHECK(traj.back() == '\n');
    CHECK(a.files.at("solution_error.csv").rfind("t,value\n", 0) == 0);
    for (const char* f : {"consensus_error.csv", "disagreement_diameter.csv", "manifest.json"})
      CHECK(a.files.count(f) == 1);

    // 17 significant digits round-trip exactly
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);

    const ErrorSeries parsed = parse_series_csv(a.files.at("solution_error.csv"));
    CHECK(parsed.values == a.solution.values);
    CHECK(parsed.times == a.solution.times);

    SlopeFit f;
    f.slope = -0.5;
    f.intercept = 1.25;
    f.t_lo = 10;
    f.t_hi = 1000;
    f.rms_residual = 0;
    CHECK(slope_fit_json(f) == "{\"slope\":-0.5,\"intercept\":1.25,\"t_lo\":10,\"t_hi\":1000,\"rms_residual\":0}\n");
    CHECK_THROWS_WITH(parse_series_csv("t,value\n1,2\n2,x\n"), "line 3: not a number pair");
    CHECK_THROWS_WITH(parse_series_csv("t,value\n2,2\n1,3\n"), "line 3: times must increase");
  }

  TEST_CASE("log-corrected outputs appear only in the log-corrected regime") {
    const RunArtifacts le3 = run_experiment(parse_config(short_run("example1-le3", 200.0)));
    CHECK(le3.files.count("solution_error_log_corrected.csv") == 1);
    CHECK(le3.files.count("fit_solution_error_log_corrected.json") == 1);
    const RunArtifacts le1 = run_experiment(parse_config(short_run("example1-le1", 200.0)));
    CHECK(le1.files.count("solution_error_log_corrected.csv") == 0);
  }

  TEST_CASE("runs are byte-identical") {
    json doc = short_run("example4", 50.0);
    doc["outputs"]["emit_svg"] = true;
    const ExperimentConfig cfg = parse_config(doc);
    const RunArtifacts a = run_experiment(cfg), b = run_experiment(cfg);
    CHECK(a.files == b.files);
    CHECK(a.files.at("solution_error.svg").rfind("<svg", 0) == 0);
  }

  TEST_CASE("Example 1 terminal mean is close to y*") {
    const RunArtifacts a = run_experiment(parse_config(preset("example1-le1")));
    CHECK(a.least_squares.distance(mean_state(a.trajectory.terminal().x, 4, 2)) < 0.05);
  }
}
