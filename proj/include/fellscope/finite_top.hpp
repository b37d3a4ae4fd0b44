#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fellscope {

/// Subset of {1..n} as a bitmask; element e is bit e - 1.
using Subset = std::uint32_t;

inline constexpr int max_criterion_size = 8;
inline constexpr int max_enumeration_size = 5;

/// Constant-net convergence criterion on {1..n}: arrow (a, b) means the
/// constant net at a converges to b. Reflexive arrows are always present.
class FiniteCriterion {
 public:
  explicit FiniteCriterion(int n);
  FiniteCriterion(int n, const std::vector<std::pair<int, int>>& arrows);

  static FiniteCriterion all_arrows(int n);

  int n() const noexcept { return n_; }
  Subset full() const noexcept { return (Subset{1} << n_) - 1; }
  bool has(int a, int b) const;
  void add(int a, int b);
  /// Targets of arrows leaving a.
  Subset successors(int a) const { return succ_[static_cast<std::size_t>(a - 1)]; }
  /// Sorted list of all arrows, reflexive ones included.
  std::vector<std::pair<int, int>> arrows() const;

  bool operator==(const FiniteCriterion&) const = default;

 private:
  int n_;
  std::vector<Subset> succ_;
};

/// Topology on {1..n} as its sorted list of open sets.
class FiniteTopology {
 public:
  /// Throws ValidationFailed unless the family contains the empty and full
  /// sets and is closed under pairwise union and intersection.
  FiniteTopology(int n, std::vector<Subset> opens);

  static FiniteTopology discrete(int n);
  static FiniteTopology indiscrete(int n);

  int n() const noexcept { return n_; }
  Subset full() const noexcept { return (Subset{1} << n_) - 1; }
  const std::vector<Subset>& opens() const noexcept { return opens_; }
  bool is_open(Subset s) const;
  /// True iff every open set of `other` is open here.
  bool finer_or_equal(const FiniteTopology& other) const;

  bool operator==(const FiniteTopology&) const = default;

 private:
  int n_;
  std::vector<Subset> opens_;
};

Subset pre_closure(const FiniteCriterion& c, Subset e);
Subset closure(const FiniteCriterion& c, Subset e);

FiniteTopology generate_topology(const FiniteCriterion& c);
FiniteCriterion specialization_criterion(const FiniteTopology& t);

struct TopologicalCheck {
  bool topological;
  std::optional<std::pair<int, int>> missing_arrow;
};

TopologicalCheck is_topological(const FiniteCriterion& c);

FiniteCriterion criterion_or(const FiniteCriterion& a, const FiniteCriterion& b);
FiniteCriterion criterion_and(const FiniteCriterion& a, const FiniteCriterion& b);
FiniteTopology topology_meet(const FiniteTopology& a, const FiniteTopology& b);
FiniteTopology topology_join(const FiniteTopology& a, const FiniteTopology& b);

/// Every topology on {1..n}, n <= 5, sorted by open-set list. Throws TooLarge
/// above that.
std::vector<FiniteTopology> enumerate_topologies(int n);

/// Compact notation: "12" for {1, 2}, "∅" for the empty set.
std::string format_subset(Subset s, int n);
std::vector<int> subset_elements(Subset s, int n);
Subset subset_from_elements(const std::vector<int>& elements, int n);
/// Parses compact notation ("12", "∅", "" all accepted).
Subset parse_subset(const std::string& text, int n);

}  // namespace fellscope
