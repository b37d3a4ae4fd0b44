#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fellscope/closed_sets.hpp"

namespace fellscope {

enum class Status { pass, fail, inconclusive };

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

struct Witness {
  std::optional<int> index;
  std::vector<double> point;
  std::string clause;

  bool operator==(const Witness&) const = default;
};

struct Verdict {
  Status status = Status::pass;
  std::vector<Witness> witnesses;
  /// First index after which membership held through the horizon.
  std::optional<int> final_index;

  bool passed() const noexcept { return status == Status::pass; }
  bool operator==(const Verdict&) const = default;
};

enum class SetKind { one_d, cloud };

/// A sequence of closed sets indexed from `first_index`. The generator must
/// be deterministic and free of side effects.
struct SetSequence {
  SetKind kind = SetKind::one_d;
  std::function<SetValue(int)> generator;
  std::string description;
  int first_index = 1;

  SetValue at(int i) const { return generator(i); }
};

/// Discretization of "finally" / "cofinally": the tail window [n0, n1], the
/// cluster radius eps and the candidate grid laid over `window`.
struct EstimationConfig {
  double eps = 0.02;
  int n0 = 50;
  int n1 = 200;
  double grid_pitch = 0.01;
  Box window = Box::interval(-2.0, 2.0);

  /// Throws BadWindow for n1 < n0, InvalidConfig for the other invariants.
  void validate() const;
};

/// {A : (A ∩ K) ⊆ U and A meets every V_i}. Without a control set K the
/// containment clause constrains all of A, which expresses the upper
/// Vietoris subbasic sets in the same shape.
struct FellNeighborhood {
  Region u;
  std::optional<CompactSet> k;
  std::vector<Region> hits;
  std::string label;
};

enum class Hypertopology { lower_vietoris, upper_vietoris, upper_cocompact, fell };

std::string_view to_string(Hypertopology kind);
Hypertopology hypertopology_from_string(std::string_view s);

struct KuratowskiEstimates {
  SetValue li;
  SetValue ls;
};

/// Both estimates from one pass over the tail window.
KuratowskiEstimates kuratowski_estimates(const SetSequence& seq, const EstimationConfig& cfg);

/// Grid points within eps of some A_i, i in [n0, n1].
SetValue ls_estimate(const SetSequence& seq, const EstimationConfig& cfg);
/// Grid points within eps of every A_i, i in [n0, n1].
SetValue li_estimate(const SetSequence& seq, const EstimationConfig& cfg);

/// Kuratowski-Painlevé verdict against a candidate limit `a`: the cluster
/// estimate must lie within 2*eps of `a` (the estimate is itself an
/// eps-fattening), and `a` within eps of the limit estimate.
Verdict kp_verdict(const SetSequence& seq, const SetValue& a, const EstimationConfig& cfg);

bool fell_member(const SetValue& a, const FellNeighborhood& nb);

/// Describes why `a` is not in the neighbourhood, or nullopt if it is.
std::optional<Witness> fell_violation(const SetValue& a, const FellNeighborhood& nb);

/// Scans i = max(first, seq.first_index)..n1. Passes with the least m such that A_i is in the
/// neighbourhood for all i in [m, n1]; fails when membership fails at n1.
Verdict finally_in(const SetSequence& seq, const FellNeighborhood& nb, int n1, int first = 1);

/// Finite family of subbasic neighbourhoods of `a` at resolution eps.
std::vector<FellNeighborhood> canonical_family(const SetValue& a, Hypertopology kind,
                                               const EstimationConfig& cfg);

/// Conjunction of "finally in" over the canonical family, where finally
/// means membership at every index of the tail window [n0, n1].
Verdict hypertopology_verdict(const SetSequence& seq, const SetValue& a, Hypertopology kind,
                              const EstimationConfig& cfg);

/// Restriction of a set to the estimation window.
SetValue clip_to_window(const SetValue& a, const Box& window);

/// Greedy eps-net of a point cloud: every point is within `spacing` of a
/// returned point.
PointCloud cloud_net(const PointCloud& cloud, double spacing);

}  // namespace fellscope
