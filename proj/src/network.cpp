#include "lsflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>

#include "lsflow/problem.hpp"

namespace lsflow {

WeightedGraph::WeightedGraph(std::size_t nodes, std::vector<Edge> edges)
    : nodes_(nodes), edges_(std::move(edges)) {
  if (nodes_ == 0) throw std::invalid_argument("graph: node count must be positive");
  for (Edge& e : edges_) {
    if (e.i >= nodes_ || e.j >= nodes_) throw std::invalid_argument("graph: edge endpoint out of range");
    if (e.i == e.j) throw std::invalid_argument("graph: self-loop");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw std::invalid_argument("graph: edge weights must be positive and finite");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw std::invalid_argument("graph: duplicate edge");
    }
  }
}

WeightedGraph WeightedGraph::path(std::size_t nodes, double weight) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < nodes; ++i) edges.push_back({i, i + 1, weight});
  return {nodes, std::move(edges)};
}

WeightedGraph WeightedGraph::ring(std::size_t nodes, double weight) {
  if (nodes < 3) return path(nodes, weight);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes; ++i) edges.push_back({i, (i + 1) % nodes, weight});
  return {nodes, std::move(edges)};
}

WeightedGraph WeightedGraph::star(std::size_t nodes, std::size_t center, double weight) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes; ++i)
    if (i != center) edges.push_back({center, i, weight});
  return {nodes, std::move(edges)};
}

std::optional<double> WeightedGraph::weight(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  for (const Edge& e : edges_)
    if (e.i == i && e.j == j) return e.weight;
  return std::nullopt;
}

Matrix WeightedGraph::adjacency() const {
  Matrix a(nodes_, nodes_);
  for (const Edge& e : edges_) a(e.i, e.j) = a(e.j, e.i) = e.weight;
  return a;
}

Matrix WeightedGraph::laplacian() const {
  Matrix l(nodes_, nodes_);
  for (const Edge& e : edges_) {
    l(e.i, e.i) += e.weight;
    l(e.j, e.j) += e.weight;
    l(e.i, e.j) -= e.weight;
    l(e.j, e.i) -= e.weight;
  }
  return l;
}

double WeightedGraph::algebraic_connectivity() const {
  if (nodes_ < 2) return 0.0;
  return sym_eigen(laplacian()).values[1];
}

bool WeightedGraph::is_connected() const {
  if (nodes_ <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(nodes_);
  for (const Edge& e : edges_) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<bool> seen(nodes_, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == nodes_;
}

SwitchingSignal::SwitchingSignal(std::vector<WeightedGraph> graphs, std::vector<Segment> segments,
                                 bool periodic)
    : graphs_(std::move(graphs)), segments_(std::move(segments)), periodic_(periodic) {
  if (graphs_.empty()) throw std::invalid_argument("signal: no graphs");
  if (segments_.empty()) throw std::invalid_argument("signal: no segments");
  for (const WeightedGraph& g : graphs_) {
    if (g.nodes() != graphs_.front().nodes()) throw std::invalid_argument("signal: graphs differ in node count");
  }
  offsets_.push_back(0.0);
  for (const Segment& s : segments_) {
    if (s.graph >= graphs_.size()) throw std::invalid_argument("signal: segment references an unknown graph");
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
      throw std::invalid_argument("signal: segment durations must be positive");
    }
    offsets_.push_back(offsets_.back() + s.duration);
  }
  period_ = offsets_.back();
}

SwitchingSignal SwitchingSignal::fixed(WeightedGraph g) {
  return {{std::move(g)}, {{0, 1.0}}, true};
}

double SwitchingSignal::dwell_floor() const {
  double d = std::numeric_limits<double>::infinity();
  for (const Segment& s : segments_) d = std::min(d, s.duration);
  return d;
}

std::vector<std::size_t> SwitchingSignal::referenced_graphs() const {
  std::set<std::size_t> used;
  for (const Segment& s : segments_) used.insert(s.graph);
  return {used.begin(), used.end()};
}

double SwitchingSignal::boundary_eps() const { return 1e-9 * dwell_floor(); }

SwitchingSignal::Instance SwitchingSignal::instance_at(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("signal: time must be >= 0");
  const double eps = boundary_eps();
  const std::size_t n = segments_.size();
  auto locate = [&](double r) {
    std::size_t j = 0;
    while (j + 1 < n && offsets_[j + 1] <= r + eps) ++j;
    return j;
  };
  if (!periodic_) {
    const std::size_t j = locate(t);
    const double end = j + 1 == n ? std::numeric_limits<double>::infinity() : offsets_[j + 1];
    return {0, j, offsets_[j], end};
  }
  auto cycle = static_cast<std::size_t>(std::floor(t / period_));
  double r = t - static_cast<double>(cycle) * period_;
  if (r >= period_ - eps) {
    ++cycle;
    r = 0.0;
  }
  const std::size_t j = locate(r);
  const double base = static_cast<double>(cycle) * period_;
  return {cycle, j, base + offsets_[j], base + offsets_[j + 1]};
}

SwitchingSignal::Instance SwitchingSignal::next_instance(const Instance& current) const {
  const std::size_t n = segments_.size();
  if (!periodic_) {
    if (current.segment + 1 >= n) return current;
    const std::size_t j = current.segment + 1;
    const double end = j + 1 == n ? std::numeric_limits<double>::infinity() : offsets_[j + 1];
    return {0, j, offsets_[j], end};
  }
  std::size_t cycle = current.cycle;
  std::size_t j = current.segment + 1;
  if (j == n) {
    j = 0;
    ++cycle;
  }
  const double base = static_cast<double>(cycle) * period_;
  return {cycle, j, base + offsets_[j], base + offsets_[j + 1]};
}

const WeightedGraph& SwitchingSignal::graph_at(double t) const {
  return graphs_[segments_[instance_at(t).segment].graph];
}

WeightedGraph SwitchingSignal::joint_graph(double t1, double t2) const {
  if (!(t1 >= 0.0) || !(t2 > t1)) throw std::invalid_argument("joint graph: need 0 <= t1 < t2");
  const double eps = boundary_eps();
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  Instance inst = instance_at(t1);
  while (true) {
    for (const Edge& e : graphs_[segments_[inst.segment].graph].edges()) {
      double& w = merged[{e.i, e.j}];
      w = std::max(w, e.weight);
    }
    if (inst.end >= t2 - eps) break;
    inst = next_instance(inst);
  }
  std::vector<Edge> edges;
  for (const auto& [key, w] : merged) edges.push_back({key.first, key.second, w});
  return {nodes(), std::move(edges)};
}

bool SwitchingSignal::is_uniformly_jointly_connected(double window) const {
  if (!(window > 0.0)) throw std::invalid_argument("joint connectivity: window must be positive");
  // Between two segment starts the set of covered segments only grows as the
  // window start moves right, so checking starts at boundaries suffices.
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    if (!joint_graph(offsets_[j], offsets_[j] + window).is_connected()) return false;
  }
  return true;
}

ScenarioClass classify_scenario(const SwitchingSignal& s) {
  const std::vector<std::size_t> used = s.referenced_graphs();
  const bool all_connected = std::all_of(used.begin(), used.end(),
                                         [&](std::size_t g) { return s.graphs()[g].is_connected(); });
  if (used.size() == 1) {
    return {all_connected ? ScenarioKind::FixedConnected : ScenarioKind::Unsupported, 0.0};
  }
  if (all_connected) return {ScenarioKind::SwitchingAllConnected, 0.0};
  if (s.periodic()) {
    const std::size_t n = s.segments().size();
    for (std::size_t k = 1; k <= n; ++k) {
      const double window = s.period() * static_cast<double>(k) / static_cast<double>(n);
      if (s.is_uniformly_jointly_connected(window)) return {ScenarioKind::UniformlyJointlyConnected, window};
    }
  }
  return {ScenarioKind::Unsupported, 0.0};
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::FixedConnected: return "FixedConnected";
    case ScenarioKind::SwitchingAllConnected: return "SwitchingAllConnected";
    case ScenarioKind::UniformlyJointlyConnected: return "UniformlyJointlyConnected";
    case ScenarioKind::Unsupported: return "Unsupported";
  }
  return "unknown";
}

SpectralFloors spectral_floors(const SwitchingSignal& s, const LinearEquationProblem& p) {
  if (s.nodes() != p.nodes()) throw DimensionError("spectral floors: signal and problem node counts differ");
  SpectralFloors out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const Matrix h_tilde = p.stacked_gram();
  for (std::size_t g : s.referenced_graphs()) {
    const WeightedGraph& graph = s.graphs()[g];
    out.sigma2_star = std::min(out.sigma2_star, graph.algebraic_connectivity());
    const Matrix pm = kron_identity(graph.laplacian(), p.dim()) + h_tilde;
    out.sigmam_star = std::min(out.sigmam_star, sym_eigen(pm).values.front());
  }
  return out;
}

}  // namespace lsflow
