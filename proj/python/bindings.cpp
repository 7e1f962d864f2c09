#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

#include "lsflow/experiment.hpp"
#include "lsflow/export.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

lsflow::LinearEquationProblem make_problem(const Rows& h, const lsflow::Vector& z) {
  return {lsflow::Matrix::from_rows(h), z};
}

Rows to_rows(const lsflow::Matrix& m) {
  Rows out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

lsflow::WeightedGraph make_graph(std::size_t nodes, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  std::vector<lsflow::Edge> list;
  for (const auto& [i, j, w] : edges) list.push_back({i, j, w});
  return {nodes, std::move(list)};
}

lsflow::ExperimentConfig config_from(const py::object& config) {
  if (py::isinstance<py::str>(config)) {
    const auto text = config.cast<std::string>();
    if (text.find('{') != std::string::npos) return lsflow::parse_config_text(text);
    try {
      return lsflow::parse_config(lsflow::preset(text));
    } catch (const std::invalid_argument&) {
      throw lsflow::ConfigError("config", "'" + text + "' is neither a preset name nor a JSON object");
    }
  }
  const py::object dumps = py::module_::import("json").attr("dumps");
  return lsflow::parse_config_text(dumps(config).cast<std::string>());
}

py::dict fit_dict(const lsflow::SlopeFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["t_lo"] = f.t_lo;
  d["t_hi"] = f.t_hi;
  d["rms_residual"] = f.rms_residual;
  d["samples"] = f.samples;
  return d;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed least-squares flow over fixed and switching graphs";

  py::register_exception<lsflow::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lsflow::InadmissibleError>(m, "InadmissibleError", PyExc_RuntimeError);
  py::register_exception<lsflow::DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<lsflow::NotPositiveDefiniteError>(m, "NotPositiveDefiniteError", PyExc_ValueError);
  py::register_exception<lsflow::NotStronglyConvexError>(m, "NotStronglyConvexError", PyExc_ValueError);
  py::register_exception<lsflow::OutOfRateScopeError>(m, "OutOfRateScopeError", PyExc_ValueError);
  py::register_exception<lsflow::InsufficientWindowError>(m, "InsufficientWindowError", PyExc_ValueError);

  m.def("sym_eigen", [](const Rows& s) {
    const lsflow::SymEig e = lsflow::sym_eigen(lsflow::Matrix::from_rows(s));
    return py::make_tuple(e.values, to_rows(e.vectors));
  }, py::arg("matrix"), "Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix.");

  m.def("solve_spd", [](const Rows& s, const lsflow::Vector& b) {
    return lsflow::solve_spd(lsflow::Matrix::from_rows(s), b);
  }, py::arg("matrix"), py::arg("rhs"));

  m.def("least_squares", [](const Rows& h, const lsflow::Vector& z, double rank_tol) {
    const lsflow::LeastSquaresSet ls = lsflow::least_squares_set(make_problem(h, z), rank_tol);
    py::dict d;
    d["y_min_norm"] = ls.y_min_norm;
    d["nullspace_basis"] = ls.nullspace_basis;
    d["min_residual"] = ls.min_residual;
    d["unique"] = ls.unique;
    return d;
  }, py::arg("H"), py::arg("z"), py::arg("rank_tol") = lsflow::kDefaultRankTol);

  m.def("cost", [](const Rows& h, const lsflow::Vector& z, const lsflow::Vector& y) {
    return make_problem(h, z).cost(y);
  }, py::arg("H"), py::arg("z"), py::arg("y"));

  m.def("global_gradient", [](const Rows& h, const lsflow::Vector& z, const lsflow::Vector& y) {
    return make_problem(h, z).global_gradient(y);
  }, py::arg("H"), py::arg("z"), py::arg("y"));

  m.def("strong_convexity_constant", [](const Rows& h, const lsflow::Vector& z) {
    return lsflow::strong_convexity_constant(make_problem(h, z));
  }, py::arg("H"), py::arg("z"));

  m.def("problem", [](const std::string& name) {
    const lsflow::LinearEquationProblem p = lsflow::named_problem(name);
    return py::make_tuple(to_rows(p.H()), p.z());
  }, py::arg("name"), "Built-in (H, z): le1, le2, le3 or rank1.");

  py::class_<lsflow::AssumptionProfile>(m, "AssumptionProfile")
      .def_readonly("nonintegrable", &lsflow::AssumptionProfile::nonintegrable)
      .def_readonly("vanishing", &lsflow::AssumptionProfile::vanishing)
      .def_readonly("square_integrable", &lsflow::AssumptionProfile::square_integrable)
      .def("__repr__", [](const lsflow::AssumptionProfile& a) {
        return "AssumptionProfile(nonintegrable=" + std::string(a.nonintegrable ? "True" : "False") +
               ", vanishing=" + (a.vanishing ? "True" : "False") +
               ", square_integrable=" + (a.square_integrable ? "True" : "False") + ")";
      });

  py::class_<lsflow::StepSizeSchedule>(m, "StepSizeSchedule")
      .def_static("power", &lsflow::StepSizeSchedule::power, py::arg("c") = 1.0, py::arg("t0") = 1.0,
                  py::arg("lam") = 1.0)
      .def_static("constant", &lsflow::StepSizeSchedule::constant, py::arg("c"))
      .def("__call__", &lsflow::StepSizeSchedule::evaluate, py::arg("t"))
      .def("assumption_profile", &lsflow::StepSizeSchedule::assumption_profile)
      .def("__repr__", &lsflow::StepSizeSchedule::describe);

  m.def("predict_rate", [](const Rows& h, const lsflow::Vector& z, const lsflow::StepSizeSchedule& s) {
    const lsflow::RatePrediction r = lsflow::predict_rate(make_problem(h, z), s);
    return py::make_tuple(lsflow::to_string(r.regime), r.exponent, r.sigma_ratio);
  }, py::arg("H"), py::arg("z"), py::arg("schedule"), "Returns (regime, exponent, sigma_m(H^T H)/N).");

  m.def("laplacian", [](std::size_t nodes, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    return to_rows(make_graph(nodes, edges).laplacian());
  }, py::arg("nodes"), py::arg("edges"), "Edges are 0-based (i, j, weight) triples.");

  m.def("algebraic_connectivity",
        [](std::size_t nodes, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
          return make_graph(nodes, edges).algebraic_connectivity();
        }, py::arg("nodes"), py::arg("edges"));

  m.def("is_connected", [](std::size_t nodes, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    return make_graph(nodes, edges).is_connected();
  }, py::arg("nodes"), py::arg("edges"));

  m.def("fit_loglog_slope", [](const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
    lsflow::ErrorSeries s{t, v, "series"};
    if (t.size() != v.size()) throw lsflow::DimensionError("times and values differ in length");
    return fit_dict(lsflow::fit_loglog_slope(s, lo, hi));
  }, py::arg("times"), py::arg("values"), py::arg("t_lo"), py::arg("t_hi"));

  m.def("preset_names", &lsflow::preset_names);
  m.def("preset", [](const std::string& name) { return json_to_py(lsflow::preset(name)); }, py::arg("name"));

  m.def("check", [](const py::object& config) {
    const lsflow::ExperimentConfig cfg = config_from(config);
    return json_to_py(lsflow::check(cfg).to_json(cfg));
  }, py::arg("config"), "Scenario/assumption report for a preset name, JSON text or dict.");

  m.def("simulate", [](const py::object& config, double horizon) {
    lsflow::ExperimentConfig cfg = config_from(config);
    if (horizon > 0.0) {
      nlohmann::json doc = cfg.source;
      doc["horizon"] = horizon;
      cfg = lsflow::parse_config(doc);
    }
    lsflow::Trajectory traj;
    {
      py::gil_scoped_release release;
      traj = lsflow::simulate(cfg.system(), cfg.x0, cfg.integrator, cfg.horizon);
    }
    const auto rows = static_cast<py::ssize_t>(traj.samples.size());
    const auto cols = static_cast<py::ssize_t>(traj.nodes * traj.dim);
    py::array_t<double> times(rows);
    py::array_t<double> states({rows, cols});
    auto tv = times.mutable_unchecked<1>();
    auto sv = states.mutable_unchecked<2>();
    for (py::ssize_t r = 0; r < rows; ++r) {
      tv(r) = traj.samples[r].t;
      for (py::ssize_t c = 0; c < cols; ++c) sv(r, c) = traj.samples[r].x[c];
    }
    return py::make_tuple(times, states);
  }, py::arg("config"), py::arg("horizon") = 0.0,
     "Integrate an experiment; returns (times, states) with node-major state columns.");

  m.def("run", [](const py::object& config, bool force) {
    const lsflow::ExperimentConfig cfg = config_from(config);
    lsflow::RunArtifacts a;
    {
      py::gil_scoped_release release;
      a = lsflow::run_experiment(cfg, force);
    }
    py::dict files;
    for (const auto& [name, bytes] : a.files) files[py::str(name)] = py::bytes(bytes);
    return py::make_tuple(json_to_py(a.manifest), files);
  }, py::arg("config"), py::arg("force") = false, "Returns (manifest dict, {file name: bytes}).");

  m.def("limit_oracle", [](const Rows& h, const lsflow::Vector& z, const lsflow::Vector& x0) {
    const lsflow::LinearEquationProblem p = make_problem(h, z);
    return lsflow::limit_oracle(p, x0, lsflow::least_squares_set(p));
  }, py::arg("H"), py::arg("z"), py::arg("x0"));

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
