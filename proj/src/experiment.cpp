#include "lsflow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "lsflow/export.hpp"

namespace lsflow {

using nlohmann::json;

ConfigError::ConfigError(std::string where, const std::string& what)
    : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

namespace {

// Typed access to a JSON object that remembers where it sits in the document.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where(), what); }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, v] : value_.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        Node(v, path_ + "/" + key).fail("unknown key '" + key + "'");
      }
    }
  }

  bool has(const char* key) const { return value_.is_object() && value_.contains(key); }
  Node at(const char* key) const {
    if (!has(key)) fail(std::string("missing required key '") + key + "'");
    return {value_.at(key), path_ + "/" + key};
  }
  Node at(std::size_t index) const { return {value_.at(index), path_ + "/" + std::to_string(index)}; }
  std::size_t size() const { return value_.size(); }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("expected a positive number");
    return v;
  }
  std::uint64_t count() const {
    if (!value_.is_number_integer() || value_.get<std::int64_t>() < 0) fail("expected a non-negative integer");
    return value_.get<std::uint64_t>();
  }
  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }
  Vector numbers() const {
    if (!value_.is_array()) fail("expected an array of numbers");
    Vector out;
    for (std::size_t k = 0; k < size(); ++k) out.push_back(at(k).number());
    return out;
  }

  double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  double positive_or(const char* key, double fallback) const {
    return has(key) ? at(key).positive() : fallback;
  }

 private:
  const json& value_;
  std::string path_;
};

LinearEquationProblem parse_problem(const Node& node) {
  if (node.value().is_string()) {
    try {
      return named_problem(node.string());
    } catch (const std::invalid_argument& e) {
      node.fail(e.what());
    }
  }
  node.expect_object({"H", "z", "scale"});
  const Node rows = node.at("H");
  if (!rows.value().is_array() || rows.size() == 0) rows.fail("expected a non-empty array of rows");
  std::vector<Vector> h;
  for (std::size_t r = 0; r < rows.size(); ++r) h.push_back(rows.at(r).numbers());
  for (std::size_t r = 1; r < h.size(); ++r)
    if (h[r].size() != h[0].size()) rows.at(r).fail("row length differs from row 0");
  const Vector z = node.at("z").numbers();
  try {
    LinearEquationProblem p(Matrix::from_rows(h), z);
    if (node.has("scale")) return p.scaled(node.at("scale").number());
    return p;
  } catch (const std::exception& e) {
    node.fail(e.what());
  }
}

WeightedGraph parse_graph(const Node& node) {
  node.expect_object({"name", "nodes", "topology", "center", "weight", "edges"});
  const auto n = static_cast<std::size_t>(node.at("nodes").count());
  if (n == 0) node.at("nodes").fail("node count must be positive");
  const double weight = node.positive_or("weight", 1.0);
  const std::string topology = node.has("topology") ? node.at("topology").string() : "edges";
  try {
    if (topology == "path") return WeightedGraph::path(n, weight);
    if (topology == "ring") return WeightedGraph::ring(n, weight);
    if (topology == "star") {
      const auto center = static_cast<std::size_t>(node.at("center").count());
      if (center < 1 || center > n) node.at("center").fail("center must be a node in 1..N");
      return WeightedGraph::star(n, center - 1, weight);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    node.fail(e.what());
  }
  if (topology != "edges") node.at("topology").fail("expected path, ring, star or edges");
  const Node list = node.at("edges");
  if (!list.value().is_array()) list.fail("expected an array of [i, j] or [i, j, w]");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const Node e = list.at(k);
    if (!e.value().is_array() || (e.size() != 2 && e.size() != 3)) e.fail("expected [i, j] or [i, j, w]");
    const auto i = static_cast<std::size_t>(e.at(std::size_t{0}).count());
    const auto j = static_cast<std::size_t>(e.at(1).count());
    if (i < 1 || i > n || j < 1 || j > n) e.fail("endpoints must be nodes in 1..N");
    if (i == j) e.fail("self-loop");
    const double w = e.size() == 3 ? e.at(2).positive() : weight;
    edges.push_back({i - 1, j - 1, w});
  }
  try {
    return {n, std::move(edges)};
  } catch (const std::exception& ex) {
    list.fail(ex.what());
  }
}

StepSizeSchedule parse_stepsize(const Node& node) {
  node.expect_object({"kind", "c", "t0", "lambda"});
  const std::string kind = node.at("kind").string();
  if (kind == "power") {
    const double lambda = node.has("lambda") ? node.at("lambda").number() : 1.0;
    if (lambda < 0.0) node.at("lambda").fail("lambda must be >= 0");
    return StepSizeSchedule::power(node.positive_or("c", 1.0), node.positive_or("t0", 1.0), lambda);
  }
  if (kind == "constant") return StepSizeSchedule::constant(node.at("c").positive());
  node.at("kind").fail("expected power or constant");
}

IntegratorSpec parse_integrator(const Node& node) {
  IntegratorSpec spec;
  node.expect_object({"method", "h", "h_max", "growth", "fixed_until"});
  if (node.has("method")) {
    try {
      spec.method = method_from_string(node.at("method").string());
    } catch (const std::invalid_argument& e) {
      node.at("method").fail(e.what());
    }
  }
  spec.h = node.positive_or("h", spec.h);
  spec.h_max = node.positive_or("h_max", std::max(spec.h_max, spec.h));
  spec.growth = node.number_or("growth", spec.growth);
  spec.fixed_until = node.number_or("fixed_until", spec.fixed_until);
  if (spec.h_max < spec.h) node.at("h_max").fail("h_max must be >= h");
  if (spec.growth < 1.0) node.at("growth").fail("growth must be >= 1");
  if (spec.fixed_until < 0.0) node.at("fixed_until").fail("fixed_until must be >= 0");
  return spec;
}

}  // namespace

std::pair<double, double> ExperimentConfig::slope_window() const {
  return fit_window.value_or(std::pair{horizon / 100.0, horizon});
}

ExperimentConfig parse_config(const json& doc) {
  const Node root(doc, "");
  root.expect_object({"name", "problem", "graphs", "signal", "K", "stepsize", "x0", "integrator", "horizon",
                      "record", "fit", "outputs"});

  LinearEquationProblem problem = parse_problem(root.at("problem"));

  const Node graphs_node = root.at("graphs");
  if (!graphs_node.value().is_array() || graphs_node.size() == 0) graphs_node.fail("expected a non-empty array");
  std::vector<WeightedGraph> graphs;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < graphs_node.size(); ++k) {
    const Node g = graphs_node.at(k);
    graphs.push_back(parse_graph(g));
    const std::string name = g.has("name") ? g.at("name").string() : "G" + std::to_string(k + 1);
    if (std::find(names.begin(), names.end(), name) != names.end()) g.at("name").fail("duplicate graph name");
    if (graphs.back().nodes() != problem.nodes()) g.at("nodes").fail("node count must equal the problem's N");
    names.push_back(name);
  }

  std::vector<Segment> segments;
  bool periodic = true;
  if (root.has("signal")) {
    const Node sig = root.at("signal");
    sig.expect_object({"segments", "periodic"});
    if (sig.has("periodic")) periodic = sig.at("periodic").boolean();
    const Node segs = sig.at("segments");
    if (!segs.value().is_array() || segs.size() == 0) segs.fail("expected a non-empty array");
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const Node s = segs.at(k);
      s.expect_object({"graph", "duration"});
      const std::string name = s.at("graph").string();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) s.at("graph").fail("unknown graph '" + name + "'");
      segments.push_back({static_cast<std::size_t>(it - names.begin()), s.at("duration").positive()});
    }
  } else {
    if (graphs.size() != 1) root.fail("'signal' is required when more than one graph is given");
    segments.push_back({0, 1.0});
  }
  SwitchingSignal signal(std::move(graphs), std::move(segments), periodic);

  const double gain = root.at("K").positive();
  const StepSizeSchedule schedule = root.has("stepsize") ? parse_stepsize(root.at("stepsize"))
                                                          : StepSizeSchedule::power(1.0, 1.0, 1.0);

  const std::size_t length = problem.nodes() * problem.dim();
  Vector x0;
  std::optional<SeedSpec> seed;
  const Node x0_node = root.at("x0");
  if (x0_node.value().is_array()) {
    x0 = x0_node.numbers();
    if (x0.size() != length) x0_node.fail("expected " + std::to_string(length) + " entries (N*m, node-major)");
  } else {
    x0_node.expect_object({"seed", "low", "high"});
    SeedSpec s;
    s.seed = x0_node.at("seed").count();
    s.low = x0_node.number_or("low", s.low);
    s.high = x0_node.number_or("high", s.high);
    if (!(s.high > s.low)) x0_node.fail("need low < high");
    x0 = seeded_state(s, length);
    seed = s;
  }

  IntegratorSpec integrator = root.has("integrator") ? parse_integrator(root.at("integrator")) : IntegratorSpec{};
  const double horizon = root.at("horizon").positive();

  std::size_t points = 400;
  double t_min = 1e-2;
  if (root.has("record")) {
    const Node rec = root.at("record");
    rec.expect_object({"points", "t_min"});
    if (rec.has("points")) points = static_cast<std::size_t>(rec.at("points").count());
    t_min = rec.positive_or("t_min", t_min);
    if (points < 2) rec.at("points").fail("need at least 2 points");
    if (!(t_min < horizon)) rec.at("t_min").fail("t_min must be below the horizon");
  }
  if (!(t_min < horizon)) root.at("horizon").fail("horizon must exceed the first record time");
  integrator.record_times = geometric_record_times(t_min, horizon, points);

  std::optional<std::pair<double, double>> window;
  if (root.has("fit")) {
    const Node fit = root.at("fit");
    fit.expect_object({"t_lo", "t_hi"});
    window = std::pair{fit.at("t_lo").positive(), fit.at("t_hi").positive()};
    if (!(window->first < window->second)) fit.fail("need t_lo < t_hi");
  }

  std::string out_dir = "out";
  bool emit_svg = false;
  if (root.has("outputs")) {
    const Node out = root.at("outputs");
    out.expect_object({"dir", "emit_svg"});
    if (out.has("dir")) out_dir = out.at("dir").string();
    if (out.has("emit_svg")) emit_svg = out.at("emit_svg").boolean();
  }
  const std::string name = root.has("name") ? root.at("name").string() : "experiment";

  ExperimentConfig cfg{
      .name = name,
      .problem = std::move(problem),
      .graph_names = std::move(names),
      .signal = std::move(signal),
      .gain = gain,
      .schedule = schedule,
      .x0 = std::move(x0),
      .x0_seed = seed,
      .integrator = std::move(integrator),
      .horizon = horizon,
      .record_points = points,
      .record_t_min = t_min,
      .fit_window = window,
      .out_dir = out_dir,
      .emit_svg = emit_svg,
      .source = doc,
  };
  if (cfg.integrator.method == Method::RK4) {
    const double limit = cfg.system().rk4_step_limit();
    if (cfg.integrator.h >= limit) {
      root.at("integrator").at("h").fail("RK4 step must be below the stability limit " + format_number(limit));
    }
  }
  return cfg;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), "JSON syntax error");
  }
}

ExperimentConfig parse_config_text(const std::string& text) { return parse_config(parse_json_text(text)); }

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_json_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ", " + e.where(), "JSON syntax error");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(load_json(path)); }

Vector seeded_state(const SeedSpec& seed, std::size_t length) {
  std::mt19937_64 gen(seed.seed);
  Vector out(length);
  for (double& v : out) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = seed.low + (seed.high - seed.low) * u;
  }
  return out;
}

namespace {

LinearEquationProblem le1() {
  return {Matrix::from_rows({{1, 1}, {1, 2.3}, {-0.5, 0.8}, {0.8, 0.2}}), {1, 3, 2, -1}};
}

}  // namespace

double unit_ratio_scale() {
  const LinearEquationProblem p = le1();
  return std::sqrt(static_cast<double>(p.nodes()) / smallest_gram_eigenvalue(p));
}

LinearEquationProblem named_problem(const std::string& name) {
  if (name == "le1") return le1();
  if (name == "le2") return {Matrix::from_rows({{2, 7}, {6, 5}, {-11, 1}, {1, 0}}), {1, 3, 2, -1}};
  if (name == "le3") return le1().scaled(unit_ratio_scale());
  if (name == "rank1") {
    return {Matrix::from_rows({{4, -2}, {2, -1}, {3, -1.5}, {-1.5, 0.75}, {1, -0.5}}), {1, 3, 2, 3, -2}};
  }
  throw std::invalid_argument("unknown problem '" + name + "' (expected le1, le2, le3 or rank1)");
}

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(Vector(row.begin(), row.end()));
  }
  return rows;
}

json problem_json(const std::string& name) {
  if (name == "le3") {
    const LinearEquationProblem p = le1();
    return {{"H", matrix_json(p.H())}, {"z", p.z()}, {"scale", unit_ratio_scale()}};
  }
  const LinearEquationProblem p = named_problem(name);
  return {{"H", matrix_json(p.H())}, {"z", p.z()}};
}

const Vector kExample3X0a = {3.5, 4, 5, -4, -4, 3, -2, -3.4, -5, 4.5};
const Vector kExample3X0b = {-2, 1.25, -3, 2, 1, 3, 1.3, 0.8, -0.8, 3.5};
constexpr std::uint64_t kFixedGraphSeed = 20190601;

json base_preset(const std::string& name, double horizon) {
  return {
      {"name", name},
      {"K", 100.0},
      {"integrator", {{"method", "trapezoidal"}, {"h", 1e-3}, {"h_max", 0.5}, {"growth", 1.05}, {"fixed_until", 10.0}}},
      {"horizon", horizon},
      {"record", {{"points", 400}, {"t_min", 1e-2}}},
      {"outputs", {{"dir", "out/" + name}, {"emit_svg", false}}},
  };
}

json fixed_path_preset(const std::string& name, const std::string& problem, double lambda, double horizon) {
  json p = base_preset(name, horizon);
  p["problem"] = problem_json(problem);
  p["graphs"] = json::array({{{"name", "path"}, {"nodes", 4}, {"topology", "path"}}});
  p["stepsize"] = {{"kind", "power"}, {"c", 1.0}, {"t0", 1.0}, {"lambda", lambda}};
  p["x0"] = {{"seed", kFixedGraphSeed}, {"low", -5.0}, {"high", 5.0}};
  return p;
}

json switching_preset(const std::string& name, const json& graphs, const std::string& first,
                      const std::string& second, const Vector& x0) {
  json p = base_preset(name, 1e4);
  p["problem"] = problem_json("rank1");
  p["graphs"] = graphs;
  p["signal"] = {{"segments", json::array({{{"graph", first}, {"duration", 0.1}}, {{"graph", second}, {"duration", 0.1}}})},
                 {"periodic", true}};
  p["stepsize"] = {{"kind", "power"}, {"c", 1.0}, {"t0", 1.0}, {"lambda", 1.0}};
  p["x0"] = x0;
  return p;
}

json connected_pair() {
  return json::array({{{"name", "G1"}, {"nodes", 5}, {"topology", "path"}},
                      {{"name", "G2"}, {"nodes", 5}, {"topology", "star"}, {"center", 3}}});
}

json disconnected_pair() {
  return json::array({{{"name", "G3"}, {"nodes", 5}, {"edges", json::array({{1, 2}, {2, 3}})}},
                      {{"name", "G4"}, {"nodes", 5}, {"edges", json::array({{3, 4}, {4, 5}, {5, 1}})}}});
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"example1-le1",  "example1-le2", "example1-le3", "example2-l075", "example2-l05",
          "example2-l025", "example3-x0a", "example3-x0b", "example4"};
}

json preset(const std::string& name) {
  // Short aliases pick the first variant of each example.
  if (name == "example1") return preset("example1-le1");
  if (name == "example2") return preset("example2-l075");
  if (name == "example3") return preset("example3-x0a");
  if (name == "example1-le1") return fixed_path_preset(name, "le1", 1.0, 1e4);
  if (name == "example1-le2") return fixed_path_preset(name, "le2", 1.0, 1e4);
  if (name == "example1-le3") return fixed_path_preset(name, "le3", 1.0, 1e4);
  if (name == "example2-l075") {
    // The exp(-c t^0.25) transient still dominates below ~1e5.
    json p = fixed_path_preset(name, "le1", 0.75, 1e6);
    p["fit"] = {{"t_lo", 1e5}, {"t_hi", 1e6}};
    return p;
  }
  if (name == "example2-l05") return fixed_path_preset(name, "le1", 0.5, 1e5);
  if (name == "example2-l025") return fixed_path_preset(name, "le1", 0.25, 1e5);
  if (name == "example3-x0a") return switching_preset(name, connected_pair(), "G1", "G2", kExample3X0a);
  if (name == "example3-x0b") return switching_preset(name, connected_pair(), "G1", "G2", kExample3X0b);
  if (name == "example4") return switching_preset(name, disconnected_pair(), "G3", "G4", kExample3X0a);
  throw std::invalid_argument("unknown preset '" + name + "'");
}

CheckReport check(const ExperimentConfig& cfg) {
  CheckReport r;
  r.scenario = classify_scenario(cfg.signal);
  r.dwell_floor = cfg.signal.dwell_floor();
  r.assumptions = cfg.schedule.assumption_profile();
  r.admissible = cfg.schedule.admissible_for(r.scenario.kind);
  r.floors = spectral_floors(cfg.signal, cfg.problem);
  r.sigma_ratio = smallest_gram_eigenvalue(cfg.problem) / static_cast<double>(cfg.problem.nodes());
  for (const WeightedGraph& g : cfg.signal.graphs()) r.sigma2.push_back(g.algebraic_connectivity());
  r.unique_solution = least_squares_set(cfg.problem).unique;
  try {
    r.rate = predict_rate(cfg.problem, cfg.schedule);
  } catch (const OutOfRateScopeError& e) {
    r.rate_note = e.what();
  }
  if (r.scenario.kind != ScenarioKind::FixedConnected && r.rate) {
    r.rate.reset();
    r.rate_note = "rate prediction covers fixed connected graphs only";
  }
  if (cfg.integrator.method == Method::RK4) r.rk4_step_limit = cfg.system().rk4_step_limit();
  return r;
}

json CheckReport::to_json(const ExperimentConfig& cfg) const {
  json sigma2_by_graph = json::object();
  for (std::size_t k = 0; k < sigma2.size(); ++k) sigma2_by_graph[cfg.graph_names[k]] = sigma2[k];
  json out = {
      {"scenario", to_string(scenario.kind)},
      {"joint_window", scenario.kind == ScenarioKind::UniformlyJointlyConnected ? json(scenario.window) : json(nullptr)},
      {"dwell_floor", dwell_floor},
      {"assumptions",
       {{"nonintegrable", assumptions.nonintegrable},
        {"vanishing", assumptions.vanishing},
        {"square_integrable", assumptions.square_integrable}}},
      {"admissible", admissible},
      {"sigma_m_gram", sigma_ratio * static_cast<double>(cfg.problem.nodes())},
      {"sigma_ratio", sigma_ratio},
      {"sigma2", sigma2_by_graph},
      {"sigma2_star", floors.sigma2_star},
      {"sigmam_star", floors.sigmam_star},
      {"unique_solution", unique_solution},
  };
  if (rate) {
    out["rate_prediction"] = {{"regime", to_string(rate->regime)}, {"exponent", rate->exponent}};
  } else {
    out["rate_prediction"] = nullptr;
    out["rate_note"] = rate_note;
  }
  if (rk4_step_limit) out["rk4_step_limit"] = *rk4_step_limit;
  return out;
}

std::string CheckReport::to_text(const ExperimentConfig& cfg) const {
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  std::ostringstream os;
  os << "experiment:        " << cfg.name << '\n';
  os << "scenario:          " << to_string(scenario.kind);
  if (scenario.kind == ScenarioKind::UniformlyJointlyConnected) os << " (T = " << format_number(scenario.window) << ')';
  os << '\n';
  os << "dwell floor:       " << format_number(dwell_floor) << '\n';
  os << "step size:         " << cfg.schedule.describe() << '\n';
  os << "assumption (i):    " << yes(assumptions.nonintegrable) << "  (integral of alpha diverges)\n";
  os << "assumption (ii):   " << yes(assumptions.vanishing) << "  (alpha -> 0)\n";
  os << "assumption (iii):  " << yes(assumptions.square_integrable) << "  (alpha^2 integrable)\n";
  os << "admissible:        " << yes(admissible) << '\n';
  os << "sigma_m(H^T H)/N:  " << format_number(sigma_ratio) << '\n';
  for (std::size_t k = 0; k < sigma2.size(); ++k)
    os << "sigma_2(L) " << cfg.graph_names[k] << ": " << format_number(sigma2[k]) << '\n';
  os << "sigma_2*:          " << format_number(floors.sigma2_star) << '\n';
  os << "sigma_m*:          " << format_number(floors.sigmam_star) << '\n';
  os << "unique solution:   " << yes(unique_solution) << '\n';
  if (rate) {
    os << "rate prediction:   " << to_string(rate->regime) << " (exponent " << format_number(rate->exponent) << ")\n";
  } else {
    os << "rate prediction:   none (" << rate_note << ")\n";
  }
  if (rk4_step_limit) os << "rk4 step limit:    " << format_number(*rk4_step_limit) << '\n';
  return os.str();
}

namespace {

json series_summary(const ErrorSeries& s) {
  return {{"final", s.values.empty() ? 0.0 : s.values.back()}};
}

json fit_json(const SlopeFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi},
          {"rms_residual", f.rms_residual}, {"samples", f.samples}};
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg, bool force) {
  RunArtifacts a;
  a.report = check(cfg);
  if (!a.report.admissible && !force) {
    throw InadmissibleError("step size " + cfg.schedule.describe() + " is not admissible for scenario " +
                            to_string(a.report.scenario.kind) + " (use --force to run anyway)");
  }
  const FlowSystem sys = cfg.system();
  a.trajectory = simulate(sys, cfg.x0, cfg.integrator, cfg.horizon);
  a.least_squares = least_squares_set(cfg.problem);
  a.oracle = limit_oracle(cfg.problem, cfg.x0, a.least_squares);
  a.consensus = consensus_series(a.trajectory);
  a.solution = solution_error(a.trajectory, a.least_squares);
  a.diameter = diameter_series(a.trajectory);

  const auto [t_lo, t_hi] = cfg.slope_window();
  json fits = json::object();
  try {
    a.solution_fit = fit_loglog_slope(a.solution, t_lo, t_hi);
    fits["solution_error"] = fit_json(*a.solution_fit);
  } catch (const InsufficientWindowError&) {
    fits["solution_error"] = nullptr;
  }
  if (a.report.rate && a.report.rate->regime == RateRegime::LogCorrected) {
    a.solution_log_corrected = log_corrected(a.solution);
    try {
      a.log_corrected_fit = fit_loglog_slope(*a.solution_log_corrected, t_lo, t_hi);
      fits["solution_error_log_corrected"] = fit_json(*a.log_corrected_fit);
    } catch (const InsufficientWindowError&) {
      fits["solution_error_log_corrected"] = nullptr;
    }
  }

  const Sample& last = a.trajectory.terminal();
  const Vector mean = mean_state(last.x, a.trajectory.nodes, a.trajectory.dim);
  json nullspace = json::array();
  for (const Vector& v : a.least_squares.nullspace_basis) nullspace.push_back(v);

  a.manifest = {
      {"name", cfg.name},
      {"config", cfg.source},
      {"x0", cfg.x0},
      {"check", a.report.to_json(cfg)},
      {"least_squares",
       {{"y_min_norm", a.least_squares.y_min_norm},
        {"nullspace_basis", nullspace},
        {"min_residual", a.least_squares.min_residual},
        {"unique", a.least_squares.unique}}},
      {"limit_oracle", a.oracle},
      {"integration",
       {{"method", to_string(a.trajectory.method)},
        {"h", cfg.integrator.h},
        {"h_max", cfg.integrator.h_max},
        {"growth", cfg.integrator.growth},
        {"fixed_until", cfg.integrator.fixed_until},
        {"steps", a.trajectory.steps},
        {"samples", a.trajectory.samples.size()}}},
      {"terminal",
       {{"t", last.t},
        {"mean_state", mean},
        {"consensus_error", a.consensus.values.back()},
        {"disagreement_diameter", a.diameter.values.back()},
        {"solution_error", a.solution.values.back()},
        {"residual_at_mean", cfg.problem.cost(mean)},
        {"oracle_gap", norm(sub(mean, a.oracle))}}},
      {"max_state_norm", boundedness_monitor(a.trajectory)},
      {"series",
       {{"consensus_error", series_summary(a.consensus)},
        {"solution_error", series_summary(a.solution)},
        {"disagreement_diameter", series_summary(a.diameter)}}},
      {"fits", fits},
  };

  a.files["trajectory.csv"] = trajectory_csv(a.trajectory);
  a.files["consensus_error.csv"] = series_csv(a.consensus);
  a.files["solution_error.csv"] = series_csv(a.solution);
  a.files["disagreement_diameter.csv"] = series_csv(a.diameter);
  if (a.solution_fit) a.files["fit_solution_error.json"] = slope_fit_json(*a.solution_fit);
  if (a.solution_log_corrected) {
    a.files["solution_error_log_corrected.csv"] = series_csv(*a.solution_log_corrected);
    if (a.log_corrected_fit) a.files["fit_solution_error_log_corrected.json"] = slope_fit_json(*a.log_corrected_fit);
  }
  if (cfg.emit_svg) {
    a.files["solution_error.svg"] = loglog_svg(a.solution, a.solution_fit);
    a.files["consensus_error.svg"] = loglog_svg(a.consensus, std::nullopt);
    if (a.solution_log_corrected) {
      a.files["solution_error_log_corrected.svg"] = loglog_svg(*a.solution_log_corrected, a.log_corrected_fit);
    }
  }
  a.files["manifest.json"] = a.manifest.dump(2) + "\n";
  return a;
}

void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, bytes] : artifacts.files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << bytes;
  }
}

}  // namespace lsflow
