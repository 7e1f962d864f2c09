#ifndef LSFLOW_NETWORK_HPP
#define LSFLOW_NETWORK_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lsflow/numerics.hpp"

namespace lsflow {

class LinearEquationProblem;

// Undirected edge {i, j} (0-based, i < j after normalization) with weight w > 0.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;

  bool operator==(const Edge&) const = default;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;
  // Throws std::invalid_argument on self-loops, duplicates, out-of-range
  // endpoints or non-positive weights.
  WeightedGraph(std::size_t nodes, std::vector<Edge> edges);

  static WeightedGraph path(std::size_t nodes, double weight = 1.0);
  static WeightedGraph ring(std::size_t nodes, double weight = 1.0);
  static WeightedGraph star(std::size_t nodes, std::size_t center, double weight = 1.0);

  std::size_t nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<double> weight(std::size_t i, std::size_t j) const;

  Matrix adjacency() const;
  // L = D - A.
  Matrix laplacian() const;
  // sigma_2(L); 0 for a single node.
  double algebraic_connectivity() const;
  // Breadth-first reachability from node 0.
  bool is_connected() const;

  bool operator==(const WeightedGraph&) const = default;

 private:
  std::size_t nodes_ = 0;
  std::vector<Edge> edges_;  // sorted by (i, j)
};

struct Segment {
  std::size_t graph = 0;
  double duration = 0.0;
};

// Piecewise-constant schedule of graphs. Each segment holds its graph on
// [start, start + duration); a switch instant belongs to the new segment.
// A periodic signal repeats its segment list forever, otherwise the last
// segment's graph stays active after the list ends.
class SwitchingSignal {
 public:
  SwitchingSignal(std::vector<WeightedGraph> graphs, std::vector<Segment> segments, bool periodic);
  static SwitchingSignal fixed(WeightedGraph g);

  std::size_t nodes() const { return graphs_.front().nodes(); }
  const std::vector<WeightedGraph>& graphs() const { return graphs_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool periodic() const { return periodic_; }
  double period() const { return period_; }
  // Dwell floor: the shortest segment duration.
  double dwell_floor() const;
  // Indices of graphs that some segment actually uses.
  std::vector<std::size_t> referenced_graphs() const;

  // Segment instance containing t: (segment index, absolute start, absolute end).
  struct Instance {
    std::size_t cycle = 0;
    std::size_t segment = 0;
    double start = 0.0;
    double end = 0.0;  // +inf for the open-ended last segment
  };
  Instance instance_at(double t) const;
  Instance next_instance(const Instance& current) const;

  const WeightedGraph& graph_at(double t) const;
  // Union of the edges active anywhere in [t1, t2); conflicts keep the larger weight.
  WeightedGraph joint_graph(double t1, double t2) const;
  bool is_uniformly_jointly_connected(double window) const;

 private:
  double boundary_eps() const;

  std::vector<WeightedGraph> graphs_;
  std::vector<Segment> segments_;
  std::vector<double> offsets_;  // segment start within one pass, offsets_.back() == period_
  bool periodic_ = true;
  double period_ = 0.0;
};

enum class ScenarioKind { FixedConnected, SwitchingAllConnected, UniformlyJointlyConnected, Unsupported };

struct ScenarioClass {
  ScenarioKind kind = ScenarioKind::Unsupported;
  double window = 0.0;  // joint-connectivity window T, UniformlyJointlyConnected only
};

// Candidate windows are k * period / n for k = 1..n, n = segment count.
ScenarioClass classify_scenario(const SwitchingSignal& s);
std::string to_string(ScenarioKind kind);

struct SpectralFloors {
  double sigma2_star = 0.0;  // min sigma_2(L) over referenced graphs
  double sigmam_star = 0.0;  // min sigma_m(L (x) I_m + H~) over referenced graphs
};

SpectralFloors spectral_floors(const SwitchingSignal& s, const LinearEquationProblem& p);

}  // namespace lsflow

#endif  // LSFLOW_NETWORK_HPP
