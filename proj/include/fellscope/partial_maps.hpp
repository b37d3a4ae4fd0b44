#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fellscope/closed_sets.hpp"
#include "fellscope/kuratowski.hpp"

namespace fellscope {

/// Why an integrator stopped before t_end.
struct Truncation {
  enum class Reason { blowup_threshold, field_blowup_at_step };
  Reason reason;
  int step;
  double t;
};

std::string_view to_string(Truncation::Reason r);

/// A partial map from finitely many nodes to R^dim. Values are stored
/// row-major, one row per node.
class MeshFunction {
 public:
  MeshFunction(std::size_t dim, std::vector<double> nodes, std::vector<double> values,
               std::optional<double> step = std::nullopt);

  /// Samples f at the given nodes.
  static MeshFunction sample(std::size_t dim, std::vector<double> nodes,
                             const std::function<std::vector<double>(double)>& f,
                             std::optional<double> step = std::nullopt);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double node(std::size_t k) const { return nodes_[k]; }
  std::span<const double> value(std::size_t k) const { return {values_.data() + k * dim_, dim_}; }
  std::optional<double> step() const noexcept { return step_; }

  /// Largest gap between consecutive nodes (0 for fewer than two nodes).
  double max_gap() const;
  /// Index of the node nearest to t (ties resolve to the lower one).
  std::size_t nearest_node(double t) const;

  std::optional<Truncation> truncation;

 private:
  std::size_t dim_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::optional<double> step_;
};

/// A family of mesh functions indexed from first_index. `parameter`, when
/// set, gives the step h of member i and keys the family by h.
struct MeshFamily {
  std::function<MeshFunction(int)> generator;
  std::string description;
  int first_index = 1;
  std::function<double(int)> parameter;

  MeshFunction at(int i) const { return generator(i); }
};

/// A partial map f : A -> R^dim given by its domain and an evaluation oracle.
struct LimitCandidate {
  ClosedSet1D domain;
  std::function<std::vector<double>(double)> eval;
  std::size_t dim = 1;
  std::string description;
};

/// Points (t_k, y_k) inside the window, dim 1 + d. Nodes outside are dropped;
/// the count is written to `dropped` when given.
PointCloud graph(const MeshFunction& m, const Box& window, std::size_t* dropped = nullptr);

/// The piecewise-linear interpolant of the mesh, densified so consecutive
/// points are at most `spacing` apart, restricted to the window.
PointCloud graph_polyline(const MeshFunction& m, const Box& window, double spacing);

/// Graph of the candidate within the window's time range, sampled densely
/// enough that consecutive points are at most `spacing` apart (by bisection).
/// Points whose value leaves the window are kept.
PointCloud candidate_graph(const LimitCandidate& cand, const Box& window, double spacing);

/// Euclidean distance from p to the polyline through the mesh graph.
double distance_to_polyline(const MeshFunction& m, std::span<const double> p);

/// Graph clouds of the family as a set sequence.
SetSequence graph_sequence(const MeshFamily& fam, const Box& window, double spacing);

enum class Criterion { naive0, restricted1, fell2, classical, compact_open };

std::string_view to_string(Criterion c);

struct ErrorRow {
  double h;
  double error;
};

struct SubsequenceResult {
  std::string name;
  std::vector<int> indices;
  bool passed;
};

/// Per-window outcome of the compact-open test.
struct WindowResult {
  ClosedSet1D k;
  std::optional<int> final_index;
  bool passed;
};

struct ConvergenceReport {
  Criterion criterion = Criterion::naive0;
  Verdict verdict;

  // Evaluation-style criteria.
  int sampled_points = 0;
  int approached_points = 0;
  int vacuous_points = 0;
  std::vector<SubsequenceResult> subsequences;
  double cauchy_spread = 0.0;
  int skipped_points = 0;

  // Classical.
  std::vector<ErrorRow> error_table;
  std::optional<double> order;
  std::optional<double> residual;

  // Compact-open.
  std::vector<WindowResult> windows;
};

/// Canonical subsequences of the tail window [n0, n1]: full, evens, odds,
/// squares and `draws` random draws from the given seed.
std::vector<SubsequenceResult> canonical_subsequences(int n0, int n1, std::uint64_t seed, int draws = 8);

ConvergenceReport naive_evaluation_test(const MeshFamily& fam, const LimitCandidate& cand,
                                        const EstimationConfig& cfg);

ConvergenceReport restricted_test(const MeshFamily& fam, const LimitCandidate& cand,
                                  const EstimationConfig& cfg, std::uint64_t seed = 0);

ConvergenceReport fell_test(const MeshFamily& fam, const LimitCandidate& cand, const EstimationConfig& cfg);

struct ClassicalConfig {
  int first = 3;
  int last = 10;
  double eps = 1e-2;
};

/// Error table over members first..last, keyed by fam.parameter, with a least
/// squares fit of log E against log h.
ConvergenceReport classical_test(const MeshFamily& fam, const LimitCandidate& cand, double t_star,
                                 const ClassicalConfig& cfg);

ConvergenceReport compact_open_test(const MeshFamily& fam, const LimitCandidate& cand,
                                    const std::vector<ClosedSet1D>& k_windows, const EstimationConfig& cfg);

struct GraphLimitScan {
  PointCloud estimate;
  bool is_graph;
  /// Column of largest vertical spread, when is_graph is false.
  std::optional<double> column;
};

GraphLimitScan graph_limit_scan(const MeshFamily& fam, const EstimationConfig& cfg);

}  // namespace fellscope
