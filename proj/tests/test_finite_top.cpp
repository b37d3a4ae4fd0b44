#include <doctest.h>

#include <set>

#include "fellscope/error.hpp"
#include "fellscope/finite_top.hpp"

using namespace fellscope;

namespace {

const FiniteCriterion g1(3, {{1, 2}, {2, 3}});
const FiniteCriterion g2(3, {{1, 3}, {3, 2}});

Subset s(const char* text) { return parse_subset(text, 3); }

// Closure from the definition: x is in cl(E) iff every open set holding x meets E.
Subset closure_in(const FiniteTopology& t, Subset e) {
  Subset out = 0;
  for (int x = 1; x <= t.n(); ++x) {
    const Subset bit = Subset{1} << (x - 1);
    bool adherent = true;
    for (Subset u : t.opens()) {
      if ((u & bit) && !(u & e)) adherent = false;
    }
    if (adherent) out |= bit;
  }
  return out;
}

std::vector<FiniteCriterion> all_criteria(int n) {
  std::vector<std::pair<int, int>> off;
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a != b) off.emplace_back(a, b);
    }
  }
  std::vector<FiniteCriterion> out;
  for (unsigned mask = 0; mask < (1u << off.size()); ++mask) {
    std::vector<std::pair<int, int>> arrows;
    for (std::size_t k = 0; k < off.size(); ++k) {
      if (mask >> k & 1u) arrows.push_back(off[k]);
    }
    out.emplace_back(n, arrows);
  }
  return out;
}

}  // namespace

TEST_CASE("subset notation") {
  CHECK(format_subset(0, 3) == "∅");
  CHECK(format_subset(0b101, 3) == "13");
  CHECK(parse_subset("∅", 3) == 0);
  CHECK(parse_subset("", 3) == 0);
  CHECK(parse_subset("123", 3) == 0b111);
  CHECK(subset_elements(0b110, 3) == std::vector<int>{2, 3});
  CHECK(subset_from_elements({1, 3}, 3) == 0b101);
  CHECK_THROWS_AS(parse_subset("4", 3), Error);
}

TEST_CASE("pre-closure of gamma_1") {
  CHECK(pre_closure(g1, s("∅")) == s("∅"));
  CHECK(pre_closure(g1, s("1")) == s("12"));
  CHECK(pre_closure(g1, s("2")) == s("23"));
  CHECK(pre_closure(g1, s("3")) == s("3"));
  CHECK(pre_closure(g1, s("23")) == s("23"));
  CHECK(pre_closure(g1, s("12")) == s("123"));
  CHECK(pre_closure(g1, s("13")) == s("123"));
}

TEST_CASE("closure of gamma_1") {
  CHECK(closure(g1, s("1")) == s("123"));
  CHECK(closure(g1, s("3")) == s("3"));
  CHECK(closure(g1, s("23")) == s("23"));
}

TEST_CASE("generated topologies") {
  CHECK(generate_topology(g1) == FiniteTopology(3, {s("∅"), s("1"), s("12"), s("123")}));
  CHECK(generate_topology(g2) == FiniteTopology(3, {s("∅"), s("1"), s("13"), s("123")}));
  CHECK(generate_topology(FiniteCriterion(3)) == FiniteTopology::discrete(3));
  CHECK(generate_topology(FiniteCriterion::all_arrows(3)) == FiniteTopology::indiscrete(3));
}

TEST_CASE("closure equals topological closure of the generated topology") {
  for (const auto& c : all_criteria(3)) {
    const auto t = generate_topology(c);
    for (Subset e = 0; e <= 0b111; ++e) CHECK(closure(c, e) == closure_in(t, e));
  }
}

TEST_CASE("specialization criterion") {
  const auto t1 = generate_topology(g1);
  CHECK(specialization_criterion(t1).has(1, 3));
  CHECK(specialization_criterion(FiniteTopology::discrete(3)) == FiniteCriterion(3));
  CHECK(specialization_criterion(FiniteTopology::indiscrete(3)).arrows().size() == 9);
}

TEST_CASE("topological criteria") {
  const auto c1 = is_topological(g1);
  CHECK_FALSE(c1.topological);
  REQUIRE(c1.missing_arrow);
  CHECK(*c1.missing_arrow == std::pair<int, int>{1, 3});
  CHECK(is_topological(FiniteCriterion(3)).topological);
  for (const auto& t : enumerate_topologies(3)) {
    const auto c = specialization_criterion(t);
    CHECK(is_topological(c).topological);
    CHECK(generate_topology(c) == t);
  }
}

TEST_CASE("topological iff transitive") {
  for (const auto& c : all_criteria(3)) {
    bool transitive = true;
    for (int a = 1; a <= 3; ++a) {
      for (int b = 1; b <= 3; ++b) {
        for (int d = 1; d <= 3; ++d) {
          if (c.has(a, b) && c.has(b, d) && !c.has(a, d)) transitive = false;
        }
      }
    }
    CHECK(is_topological(c).topological == transitive);
  }
}

TEST_CASE("lattice operations on the gamma pair") {
  const auto t1 = generate_topology(g1), t2 = generate_topology(g2);
  CHECK(topology_join(t1, t2) == FiniteTopology(3, {s("∅"), s("1"), s("12"), s("13"), s("123")}));
  CHECK(topology_meet(t1, t2) == FiniteTopology(3, {s("∅"), s("1"), s("123")}));
  CHECK(generate_topology(criterion_or(g1, g2)) == topology_meet(t1, t2));
  CHECK(generate_topology(criterion_and(g1, g2)) == FiniteTopology::discrete(3));
}

TEST_CASE("topology validation") {
  CHECK_THROWS_AS(FiniteTopology(3, {s("1"), s("123")}), Error);
  CHECK_THROWS_AS(FiniteTopology(3, {s("∅"), s("1"), s("2"), s("123")}), Error);
  CHECK(FiniteTopology(3, {s("123"), s("∅")}).opens() == std::vector<Subset>{0, 0b111});
}

TEST_CASE("census") {
  CHECK(enumerate_topologies(1).size() == 1);
  CHECK(enumerate_topologies(2).size() == 4);
  CHECK(enumerate_topologies(3).size() == 29);
  CHECK(enumerate_topologies(4).size() == 355);
  try {
    enumerate_topologies(6);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}

TEST_CASE("census on four points matches the generated topologies of all criteria") {
  std::set<std::vector<Subset>> seen;
  for (const auto& c : all_criteria(4)) seen.insert(generate_topology(c).opens());
  CHECK(seen.size() == 355);
  std::set<std::vector<Subset>> listed;
  for (const auto& t : enumerate_topologies(4)) listed.insert(t.opens());
  CHECK(seen == listed);
}
