#include "lsflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lsflow {

namespace {

std::string divergence_message(double t, double max_abs) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "simulation diverged at t=%.17g (max |x| = %.6g)", t, max_abs);
  return buf;
}

double max_abs_of(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::isfinite(v) ? std::abs(v) : std::numeric_limits<double>::infinity());
  return m;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

DivergenceError::DivergenceError(double t, double max_abs)
    : std::runtime_error(divergence_message(t, max_abs)), time_(t), max_abs_(max_abs) {}

FlowSystem::FlowSystem(LinearEquationProblem problem, SwitchingSignal signal, double gain,
                       StepSizeSchedule schedule)
    : problem_(std::move(problem)),
      signal_(std::move(signal)),
      gain_(gain),
      schedule_(schedule),
      h_tilde_(problem_.stacked_gram()),
      z_h_(problem_.stacked_rhs()) {
  if (!(gain_ > 0.0) || !std::isfinite(gain_)) throw std::invalid_argument("flow: K must be positive");
  if (signal_.nodes() != problem_.nodes()) {
    throw DimensionError("flow: signal node count differs from the problem's N");
  }
  for (const WeightedGraph& g : signal_.graphs()) {
    Matrix c = kron_identity(g.laplacian(), problem_.dim());
    c *= gain_;
    consensus_.push_back(std::move(c));
    adjacency_.push_back(g.adjacency());
  }
}

Matrix FlowSystem::build_M_for(std::size_t graph, double t) const {
  Matrix m = h_tilde_;
  m *= schedule_.evaluate(t);
  m += consensus_.at(graph);
  return m;
}

Matrix FlowSystem::build_M(double t) const {
  return build_M_for(signal_.segments()[signal_.instance_at(t).segment].graph, t);
}

Vector FlowSystem::rhs_for(std::size_t graph, double t, std::span<const double> x) const {
  if (x.size() != state_size()) throw DimensionError("flow: state has the wrong length");
  const double alpha = schedule_.evaluate(t);
  const Vector cx = consensus_.at(graph).apply(x);
  const Vector hx = h_tilde_.apply(x);
  Vector out(x.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -cx[k] - alpha * (hx[k] - z_h_[k]);
  return out;
}

Vector FlowSystem::rhs(double t, std::span<const double> x) const {
  return rhs_for(signal_.segments()[signal_.instance_at(t).segment].graph, t, x);
}

Vector FlowSystem::rhs_nodewise(double t, std::span<const double> x) const {
  if (x.size() != state_size()) throw DimensionError("flow: state has the wrong length");
  const std::size_t n = problem_.nodes();
  const std::size_t m = problem_.dim();
  const Matrix& a = adjacency_.at(signal_.segments()[signal_.instance_at(t).segment].graph);
  const double alpha = schedule_.evaluate(t);
  Vector out(x.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> xi = x.subspan(i * m, m);
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) == 0.0) continue;
      for (std::size_t d = 0; d < m; ++d) out[i * m + d] += gain_ * a(i, j) * (x[j * m + d] - xi[d]);
    }
    const Vector grad = problem_.local_gradient(i, xi);
    for (std::size_t d = 0; d < m; ++d) out[i * m + d] -= 0.5 * alpha * grad[d];
  }
  return out;
}

Vector FlowSystem::step_rk4_for(std::size_t graph, double t, std::span<const double> x, double h) const {
  const Vector k1 = rhs_for(graph, t, x);
  const Vector k2 = rhs_for(graph, t + 0.5 * h, axpy(0.5 * h, k1, x));
  const Vector k3 = rhs_for(graph, t + 0.5 * h, axpy(0.5 * h, k2, x));
  const Vector k4 = rhs_for(graph, t + h, axpy(h, k3, x));
  Vector out(x.begin(), x.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  return out;
}

Vector FlowSystem::step_trapezoidal_for(std::size_t graph, double t, std::span<const double> x,
                                        double h) const {
  if (x.size() != state_size()) throw DimensionError("flow: state has the wrong length");
  const std::size_t n = x.size();
  // (I + h/2 M(t+h)) x' = (I - h/2 M(t)) x + h (alpha(t) + alpha(t+h))/2 z_H
  Matrix lhs = build_M_for(graph, t + h);
  lhs *= 0.5 * h;
  for (std::size_t k = 0; k < n; ++k) lhs(k, k) += 1.0;
  const Vector mx = build_M_for(graph, t).apply(x);
  const double alpha_bar = 0.5 * (schedule_.evaluate(t) + schedule_.evaluate(t + h));
  Vector b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = x[k] - 0.5 * h * mx[k] + h * alpha_bar * z_h_[k];
  return solve_spd(lhs, b);
}

Vector FlowSystem::step_rk4(double t, std::span<const double> x, double h) const {
  return step_rk4_for(signal_.segments()[signal_.instance_at(t).segment].graph, t, x, h);
}

Vector FlowSystem::step_trapezoidal(double t, std::span<const double> x, double h) const {
  return step_trapezoidal_for(signal_.segments()[signal_.instance_at(t).segment].graph, t, x, h);
}

double FlowSystem::rk4_step_limit() const {
  double lap = 0.0;
  for (std::size_t g : signal_.referenced_graphs()) {
    lap = std::max(lap, sym_eigen(signal_.graphs()[g].laplacian()).values.back());
  }
  double row = 0.0;
  for (std::size_t i = 0; i < problem_.nodes(); ++i) {
    const auto h = problem_.row(i);
    row = std::max(row, dot(h, h));
  }
  return 2.78 / (gain_ * lap + schedule_.evaluate(0.0) * row);
}

std::string to_string(Method m) { return m == Method::RK4 ? "rk4" : "trapezoidal"; }

Method method_from_string(const std::string& name) {
  if (name == "rk4") return Method::RK4;
  if (name == "trapezoidal") return Method::Trapezoidal;
  throw std::invalid_argument("unknown integrator method '" + name + "' (expected rk4 or trapezoidal)");
}

std::vector<double> geometric_record_times(double t_min, double horizon, std::size_t points) {
  if (!(t_min > 0.0) || !(horizon > t_min)) throw std::invalid_argument("record grid: need 0 < t_min < horizon");
  if (points < 2) throw std::invalid_argument("record grid: need at least 2 points");
  std::vector<double> times(points);
  const double ratio = std::log(horizon / t_min) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) times[k] = t_min * std::exp(ratio * static_cast<double>(k));
  times.back() = horizon;
  return times;
}

Trajectory simulate(const FlowSystem& sys, std::span<const double> x0, const IntegratorSpec& spec,
                    double horizon) {
  if (x0.size() != sys.state_size()) throw DimensionError("simulate: x0 must have length N*m");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("simulate: horizon must be positive");
  if (!(spec.h > 0.0)) throw std::invalid_argument("simulate: step size must be positive");
  if (spec.method == Method::Trapezoidal && (!(spec.h_max >= spec.h) || !(spec.growth >= 1.0))) {
    throw std::invalid_argument("simulate: need h_max >= h and growth >= 1");
  }
  if (!all_finite(x0)) throw DivergenceError(0.0, max_abs_of(x0));

  std::vector<double> stops;
  for (double t : spec.record_times)
    if (t > 0.0 && t < horizon) stops.push_back(t);
  stops.push_back(horizon);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Trajectory traj;
  traj.method = spec.method;
  traj.h = spec.h;
  traj.gain = sys.gain();
  traj.schedule = sys.schedule().describe();
  traj.nodes = sys.problem().nodes();
  traj.dim = sys.problem().dim();
  traj.samples.push_back({0.0, Vector(x0.begin(), x0.end())});

  const SwitchingSignal& signal = sys.signal();
  SwitchingSignal::Instance segment = signal.instance_at(0.0);
  Vector x(x0.begin(), x0.end());
  double t = 0.0;
  double h_nominal = spec.h;
  std::size_t next_stop = 0;

  while (next_stop < stops.size()) {
    const double target = std::min(stops[next_stop], segment.end);
    double t_new = t + h_nominal;
    // Land exactly on the switch instant or record time when it is within one step.
    if (t_new >= target - 1e-9 * h_nominal) t_new = target;
    const double h = t_new - t;
    const std::size_t graph = signal.segments()[segment.segment].graph;
    x = spec.method == Method::RK4 ? sys.step_rk4_for(graph, t, x, h)
                                   : sys.step_trapezoidal_for(graph, t, x, h);
    ++traj.steps;
    t = t_new;
    if (!all_finite(x)) throw DivergenceError(t, max_abs_of(x));

    if (t == segment.end) segment = signal.next_instance(segment);
    if (t == stops[next_stop]) {
      traj.samples.push_back({t, x});
      ++next_stop;
    }
    if (spec.method == Method::Trapezoidal && t >= spec.fixed_until) {
      h_nominal = std::min(h_nominal * spec.growth, spec.h_max);
    }
  }
  return traj;
}

}  // namespace lsflow
