#include "fellscope/finite_top.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>

#include "fellscope/error.hpp"

namespace fellscope {

namespace {

void check_size(int n) {
  if (n < 1 || n > max_criterion_size) {
    throw Error(ErrorKind::TooLarge, "ground set size must be in 1.." + std::to_string(max_criterion_size));
  }
}

void check_element(int e, int n) {
  if (e < 1 || e > n) throw Error(ErrorKind::InvalidConfig, "element " + std::to_string(e) + " outside 1..n");
}

void check_same(int a, int b) {
  if (a != b) throw Error(ErrorKind::DimensionMismatch, "ground sets differ");
}

Subset bit(int e) { return Subset{1} << (e - 1); }

}  // namespace

FiniteCriterion::FiniteCriterion(int n) : n_(n) {
  check_size(n);
  succ_.resize(static_cast<std::size_t>(n));
  for (int a = 1; a <= n; ++a) succ_[static_cast<std::size_t>(a - 1)] = bit(a);
}

FiniteCriterion::FiniteCriterion(int n, const std::vector<std::pair<int, int>>& arrows) : FiniteCriterion(n) {
  for (auto [a, b] : arrows) add(a, b);
}

FiniteCriterion FiniteCriterion::all_arrows(int n) {
  FiniteCriterion c(n);
  for (auto& s : c.succ_) s = c.full();
  return c;
}

bool FiniteCriterion::has(int a, int b) const {
  check_element(a, n_);
  check_element(b, n_);
  return (succ_[static_cast<std::size_t>(a - 1)] & bit(b)) != 0;
}

void FiniteCriterion::add(int a, int b) {
  check_element(a, n_);
  check_element(b, n_);
  succ_[static_cast<std::size_t>(a - 1)] |= bit(b);
}

std::vector<std::pair<int, int>> FiniteCriterion::arrows() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 1; a <= n_; ++a) {
    for (int b = 1; b <= n_; ++b) {
      if (has(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

FiniteTopology::FiniteTopology(int n, std::vector<Subset> opens) : n_(n) {
  check_size(n);
  std::sort(opens.begin(), opens.end());
  opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
  opens_ = std::move(opens);
  auto fail = [](const std::string& why) { throw Error(ErrorKind::ValidationFailed, "not a topology: " + why); };
  if (opens_.empty() || opens_.front() != 0) fail("missing the empty set");
  if (opens_.back() != full()) fail("missing the full set");
  for (auto u : opens_) {
    if ((u & ~full()) != 0) fail("set outside the ground set");
    for (auto v : opens_) {
      if (!is_open(u | v)) fail("not closed under union");
      if (!is_open(u & v)) fail("not closed under intersection");
    }
  }
}

FiniteTopology FiniteTopology::discrete(int n) {
  check_size(n);
  std::vector<Subset> all;
  for (Subset s = 0; s <= (Subset{1} << n) - 1; ++s) all.push_back(s);
  return FiniteTopology(n, std::move(all));
}

FiniteTopology FiniteTopology::indiscrete(int n) {
  check_size(n);
  return FiniteTopology(n, {0, (Subset{1} << n) - 1});
}

bool FiniteTopology::is_open(Subset s) const { return std::binary_search(opens_.begin(), opens_.end(), s); }

bool FiniteTopology::finer_or_equal(const FiniteTopology& other) const {
  check_same(n_, other.n_);
  return std::all_of(other.opens_.begin(), other.opens_.end(), [&](Subset u) { return is_open(u); });
}

Subset pre_closure(const FiniteCriterion& c, Subset e) {
  Subset out = e;
  for (int a = 1; a <= c.n(); ++a) {
    if (e & bit(a)) out |= c.successors(a);
  }
  return out;
}

Subset closure(const FiniteCriterion& c, Subset e) {
  Subset cur = e;
  while (true) {
    const Subset next = pre_closure(c, cur);
    if (next == cur) return cur;
    cur = next;
  }
}

FiniteTopology generate_topology(const FiniteCriterion& c) {
  std::vector<Subset> opens;
  for (Subset s = 0; s <= c.full(); ++s) {
    if (pre_closure(c, s) == s) opens.push_back(c.full() & ~s);
  }
  return FiniteTopology(c.n(), std::move(opens));
}

FiniteCriterion specialization_criterion(const FiniteTopology& t) {
  FiniteCriterion c(t.n());
  for (int a = 1; a <= t.n(); ++a) {
    for (int b = 1; b <= t.n(); ++b) {
      const bool every = std::all_of(t.opens().begin(), t.opens().end(),
                                     [&](Subset u) { return !(u & bit(b)) || (u & bit(a)); });
      if (every) c.add(a, b);
    }
  }
  return c;
}

TopologicalCheck is_topological(const FiniteCriterion& c) {
  const auto spec = specialization_criterion(generate_topology(c));
  for (auto [a, b] : spec.arrows()) {
    if (!c.has(a, b)) return {false, std::make_pair(a, b)};
  }
  return {true, std::nullopt};
}

FiniteCriterion criterion_or(const FiniteCriterion& a, const FiniteCriterion& b) {
  check_same(a.n(), b.n());
  FiniteCriterion out(a.n());
  for (auto [x, y] : a.arrows()) out.add(x, y);
  for (auto [x, y] : b.arrows()) out.add(x, y);
  return out;
}

FiniteCriterion criterion_and(const FiniteCriterion& a, const FiniteCriterion& b) {
  check_same(a.n(), b.n());
  FiniteCriterion out(a.n());
  for (auto [x, y] : a.arrows()) {
    if (b.has(x, y)) out.add(x, y);
  }
  return out;
}

FiniteTopology topology_meet(const FiniteTopology& a, const FiniteTopology& b) {
  check_same(a.n(), b.n());
  std::vector<Subset> opens;
  std::set_intersection(a.opens().begin(), a.opens().end(), b.opens().begin(), b.opens().end(),
                        std::back_inserter(opens));
  return FiniteTopology(a.n(), std::move(opens));
}

FiniteTopology topology_join(const FiniteTopology& a, const FiniteTopology& b) {
  check_same(a.n(), b.n());
  std::set<Subset> base(a.opens().begin(), a.opens().end());
  base.insert(b.opens().begin(), b.opens().end());
  // Finite intersections first, then unions.
  for (bool grew = true; grew;) {
    grew = false;
    for (auto u : std::vector<Subset>(base.begin(), base.end())) {
      for (auto v : std::vector<Subset>(base.begin(), base.end())) grew |= base.insert(u & v).second;
    }
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (auto u : std::vector<Subset>(base.begin(), base.end())) {
      for (auto v : std::vector<Subset>(base.begin(), base.end())) grew |= base.insert(u | v).second;
    }
  }
  return FiniteTopology(a.n(), std::vector<Subset>(base.begin(), base.end()));
}

std::vector<FiniteTopology> enumerate_topologies(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "ground set size must be positive");
  if (n > max_enumeration_size) {
    throw Error(ErrorKind::TooLarge, "enumeration limited to n <= " + std::to_string(max_enumeration_size));
  }
  // A family is a bitmask over the 2^n subsets (at most 32 bits for n = 5).
  // Breadth-first search from the indiscrete topology: add one subset and
  // close under union and intersection.
  using Family = std::uint64_t;
  const Subset full = (Subset{1} << n) - 1;
  const Subset subsets = full + 1;
  auto close = [&](Family f) {
    for (bool grew = true; grew;) {
      grew = false;
      for (Subset u = 0; u < subsets; ++u) {
        if (!(f >> u & 1)) continue;
        for (Subset v = u + 1; v < subsets; ++v) {
          if (!(f >> v & 1)) continue;
          const Family add = (Family{1} << (u | v)) | (Family{1} << (u & v));
          if ((f | add) != f) {
            f |= add;
            grew = true;
          }
        }
      }
    }
    return f;
  };
  std::set<Family> seen;
  std::deque<Family> queue;
  const Family start = (Family{1} << 0) | (Family{1} << full);
  seen.insert(start);
  queue.push_back(start);
  while (!queue.empty()) {
    const Family f = queue.front();
    queue.pop_front();
    for (Subset s = 1; s < full; ++s) {
      if (f >> s & 1) continue;
      const Family g = close(f | (Family{1} << s));
      if (seen.insert(g).second) queue.push_back(g);
    }
  }
  std::vector<FiniteTopology> out;
  out.reserve(seen.size());
  for (Family f : seen) {
    std::vector<Subset> opens;
    for (Subset s = 0; s < subsets; ++s) {
      if (f >> s & 1) opens.push_back(s);
    }
    out.emplace_back(n, std::move(opens));
  }
  std::sort(out.begin(), out.end(), [](const FiniteTopology& a, const FiniteTopology& b) {
    return a.opens() < b.opens();
  });
  return out;
}

std::vector<int> subset_elements(Subset s, int n) {
  std::vector<int> out;
  for (int e = 1; e <= n; ++e) {
    if (s & bit(e)) out.push_back(e);
  }
  return out;
}

Subset subset_from_elements(const std::vector<int>& elements, int n) {
  Subset s = 0;
  for (int e : elements) {
    check_element(e, n);
    s |= bit(e);
  }
  return s;
}

std::string format_subset(Subset s, int n) {
  if (s == 0) return "∅";
  std::string out;
  for (int e : subset_elements(s, n)) out += std::to_string(e);
  return out;
}

Subset parse_subset(const std::string& text, int n) {
  if (text.empty() || text == "∅" || text == "{}") return 0;
  Subset s = 0;
  for (char ch : text) {
    if (ch < '1' || ch > '9') throw Error(ErrorKind::ParseError, "bad subset '" + text + "'");
    const int e = ch - '0';
    check_element(e, n);
    s |= bit(e);
  }
  return s;
}

}  // namespace fellscope
