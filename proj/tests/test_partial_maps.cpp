#include <doctest.h>

#include <cmath>

#include "fellscope/integrators.hpp"
#include "fellscope/partial_maps.hpp"

using namespace fellscope;

namespace {

EstimationConfig config(double eps, int n0, int n1, Box window) {
  EstimationConfig c;
  c.eps = eps;
  c.n0 = n0;
  c.n1 = n1;
  c.grid_pitch = eps / 2;
  c.window = std::move(window);
  return c;
}

std::vector<double> uniform(double a, double b, int steps) {
  std::vector<double> out;
  for (int k = 0; k <= steps; ++k) out.push_back(a + (b - a) * k / steps);
  return out;
}

MeshFamily g_family() {
  MeshFamily fam;
  fam.generator = [](int i) {
    const double s = i % 2 == 0 ? -1.0 : 1.0;
    auto nodes = uniform(s < 0 ? -1.0 : 0.0, s < 0 ? 0.0 : 1.0, 256);
    return MeshFunction::sample(1, nodes, [s](double t) { return std::vector<double>{s * t}; });
  };
  return fam;
}

MeshFamily constant_family(const MeshFunction& m) {
  MeshFamily fam;
  fam.generator = [m](int) { return m; };
  return fam;
}

MeshFamily euler_family() {
  MeshFamily fam;
  fam.generator = [](int i) { return integrate(exp_problem(), Method::euler(), 1.0 / i, 1.0); };
  return fam;
}

LimitCandidate exp_on(double a, double b) {
  return {ClosedSet1D::interval(a, b), [](double t) { return std::vector<double>{std::exp(t)}; }, 1, "exp"};
}

LimitCandidate point_value(double v) {
  return {ClosedSet1D::point(0), [v](double) { return std::vector<double>{v}; }, 1, ""};
}

LimitCandidate wild() {
  return {ClosedSet1D::interval(-1, 1),
          [](double t) { return std::vector<double>{t == 0 ? 0.0 : t * std::sin(1 / std::max(std::abs(t), 1e-12))}; }, 1,
          ""};
}

const Box g_window({-1.5, -1.5}, {1.5, 1.5});

}  // namespace

TEST_CASE("mesh function basics") {
  const MeshFunction m(1, {0, 0.5, 1}, {1, 1.6487, 2.7183});
  CHECK(m.size() == 3);
  CHECK(m.max_gap() == doctest::Approx(0.5));
  CHECK(m.nearest_node(0.25) == 0);
  CHECK(m.nearest_node(0.26) == 1);
  CHECK(m.nearest_node(7) == 2);
  CHECK_THROWS_AS(MeshFunction(1, {0, 1}, {1}), Error);
  CHECK_THROWS_AS(MeshFunction(1, {1, 0}, {1, 2}), Error);
}

TEST_CASE("graph of a mesh") {
  const MeshFunction m(1, {0, 0.5, 1}, {1, 1.6487, 2.7183});
  const auto g = graph(m, Box({0, 0}, {1, 3}));
  CHECK(g.size() == 3);
  CHECK(g.dim() == 2);
  CHECK(graph(MeshFunction(1, {}, {}), Box({0, 0}, {1, 3})).empty());
  std::size_t dropped = 0;
  const auto cut = graph(m, Box({0, 0}, {1, 2}), &dropped);
  CHECK(cut.size() == 2);
  CHECK(dropped == 1);
}

TEST_CASE("polyline graph spacing and distance") {
  const MeshFunction m(1, {0, 1}, {0, 1});
  const auto g = graph_polyline(m, Box({0, 0}, {1, 1}), 0.1);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(std::hypot(g.point(i)[0] - g.point(i - 1)[0], g.point(i)[1] - g.point(i - 1)[1]) <= 0.1 + 1e-12);
  }
  CHECK(distance_to_polyline(m, std::vector<double>{0, 1}) == doctest::Approx(std::sqrt(0.5)));
  CHECK(distance_to_polyline(m, std::vector<double>{2, 1}) == doctest::Approx(1));
}

TEST_CASE("naive evaluation on the g family") {
  const auto cfg = config(0.02, 20, 60, g_window);
  const auto rep = naive_evaluation_test(g_family(), wild(), cfg);
  CHECK(rep.verdict.passed());
  CHECK(rep.vacuous_points > 0);
  const auto bad = naive_evaluation_test(g_family(), point_value(1), cfg);
  CHECK(bad.verdict.status == Status::fail);
  REQUIRE_FALSE(bad.verdict.witnesses.empty());
  CHECK(bad.verdict.witnesses.front().point == std::vector<double>{0});
}

TEST_CASE("naive and fell on Euler for exp") {
  const auto cfg = config(0.05, 40, 60, Box({0, 0}, {1, 3}));
  CHECK(naive_evaluation_test(euler_family(), exp_on(0, 1), cfg).verdict.passed());
  CHECK(fell_test(euler_family(), exp_on(0, 1), cfg).verdict.passed());
  CHECK(restricted_test(euler_family(), exp_on(0, 1), cfg).verdict.passed());
}

TEST_CASE("restricted test on the g family") {
  const auto cfg = config(0.02, 20, 60, g_window);
  CHECK(restricted_test(g_family(), point_value(0), cfg, 3).verdict.passed());
  CHECK(restricted_test(g_family(), point_value(0.5), cfg, 3).verdict.status == Status::fail);
  CHECK(restricted_test(g_family(), wild(), cfg, 3).verdict.status == Status::fail);
}

TEST_CASE("restricted test on a constant family") {
  const auto m = MeshFunction::sample(1, uniform(0, 1, 64), [](double t) { return std::vector<double>{std::sin(t)}; });
  const LimitCandidate cand{ClosedSet1D::interval(0, 1), [](double t) { return std::vector<double>{std::sin(t)}; }, 1,
                            ""};
  CHECK(restricted_test(constant_family(m), cand, config(0.02, 1, 20, Box({0, -2}, {1, 2}))).verdict.passed());
}

TEST_CASE("fell test on the g family finds the wedge") {
  const auto cfg = config(0.02, 20, 60, g_window);
  const auto rep = fell_test(g_family(), point_value(0), cfg);
  CHECK(rep.verdict.status == Status::fail);
  bool near_corner = false;
  for (const auto& w : rep.verdict.witnesses) {
    if (w.point.size() == 2) near_corner = near_corner || std::hypot(std::abs(w.point[0]) - 1, w.point[1] - 1) <= 0.1;
  }
  CHECK(near_corner);
}

TEST_CASE("canonical subsequences") {
  const auto subs = canonical_subsequences(10, 40, 99);
  REQUIRE(subs.size() == 12);
  CHECK(subs[0].name == "full");
  CHECK(subs[0].indices.size() == 31);
  CHECK(subs[1].indices.front() == 10);
  CHECK(subs[2].indices.front() == 11);
  CHECK(subs[3].indices == std::vector<int>{16, 25, 36});
  for (const auto& s : subs) CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
  const auto again = canonical_subsequences(10, 40, 99);
  for (std::size_t k = 0; k < subs.size(); ++k) CHECK(subs[k].indices == again[k].indices);
}

TEST_CASE("ladder: fell pass implies restricted pass implies naive pass") {
  struct Case {
    MeshFamily fam;
    LimitCandidate cand;
    EstimationConfig cfg;
  };
  const std::vector<Case> cases{
      {g_family(), point_value(0), config(0.02, 20, 60, g_window)},
      {g_family(), wild(), config(0.02, 20, 60, g_window)},
      {g_family(), point_value(1), config(0.02, 20, 60, g_window)},
      {euler_family(), exp_on(0, 1), config(0.05, 40, 60, Box({0, 0}, {1, 3}))},
      {euler_family(), exp_on(0, 0.5), config(0.05, 40, 60, Box({0, 0}, {1, 3}))},
  };
  for (const auto& c : cases) {
    const bool fell = fell_test(c.fam, c.cand, c.cfg).verdict.passed();
    const bool restricted = restricted_test(c.fam, c.cand, c.cfg).verdict.passed();
    const bool naive = naive_evaluation_test(c.fam, c.cand, c.cfg).verdict.passed();
    CHECK((!fell || restricted));
    CHECK((!restricted || naive));
  }
}

TEST_CASE("compact-open test on tanh") {
  MeshFamily fam;
  fam.generator = [](int i) {
    return MeshFunction::sample(1, uniform(-1, 1, 1024), [i](double t) { return std::vector<double>{std::tanh(i * t)}; });
  };
  auto sign = [](double t) { return std::vector<double>{t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)}; };
  const auto cfg = config(0.02, 50, 100, g_window);
  const LimitCandidate split{normalize({{-1, -0.1}, {0.1, 1}}), sign, 1, ""};
  const LimitCandidate full{ClosedSet1D::interval(-1, 1), sign, 1, ""};
  CHECK(compact_open_test(fam, split, {ClosedSet1D::interval(0.5, 1)}, cfg).verdict.passed());
  CHECK(compact_open_test(fam, full, {ClosedSet1D::interval(-1, 1)}, cfg).verdict.status == Status::fail);
}

TEST_CASE("compact-open test on a constant family") {
  const auto m = MeshFunction::sample(1, uniform(0, 1, 64), [](double t) { return std::vector<double>{t * t}; });
  const LimitCandidate cand{ClosedSet1D::interval(0, 1), [](double t) { return std::vector<double>{t * t}; }, 1, ""};
  const auto rep = compact_open_test(constant_family(m), cand, {ClosedSet1D::interval(0, 1)}, config(0.02, 1, 10, Box({0, -1}, {1, 2})));
  CHECK(rep.verdict.passed());
  REQUIRE(rep.windows.size() == 1);
  CHECK(rep.windows[0].final_index == 1);
}

TEST_CASE("graph limit scan") {
  const auto line = MeshFunction::sample(1, uniform(-1, 1, 256), [](double t) { return std::vector<double>{t}; });
  CHECK(graph_limit_scan(constant_family(line), config(0.02, 1, 5, g_window)).is_graph);
  CHECK(graph_limit_scan(g_family(), config(0.02, 20, 60, g_window)).is_graph);

  MeshFamily tanh_fam;
  tanh_fam.generator = [](int i) {
    return MeshFunction::sample(1, uniform(-1, 1, 1024), [i](double t) { return std::vector<double>{std::tanh(i * t)}; });
  };
  const auto scan = graph_limit_scan(tanh_fam, config(0.02, 200, 400, g_window));
  CHECK_FALSE(scan.is_graph);
  REQUIRE(scan.column);
  CHECK(std::abs(*scan.column) <= 0.05);
}

TEST_CASE("steep single-valued graphs stay graphs") {
  const auto steep = MeshFunction::sample(1, uniform(-1, 1, 512), [](double t) { return std::vector<double>{4 * t}; });
  CHECK(graph_limit_scan(constant_family(steep), config(0.02, 1, 3, Box({-1.5, -5}, {1.5, 5}))).is_graph);
}

TEST_CASE("classical test errors") {
  MeshFamily short_fam = refinement_family(exp_problem(), Method::euler(), 1.0, 0.5);
  try {
    classical_test(short_fam, exp_on(0, 2), 1.0, ClassicalConfig{});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainMismatch);
  }
}

TEST_CASE("classical error table against a direct computation") {
  const auto fam = refinement_family(exp_problem(), Method::euler(), 1.0, 1.0);
  const auto rep = classical_test(fam, exp_on(0, 2), 1.0, ClassicalConfig{3, 6, 1e-1});
  REQUIRE(rep.error_table.size() == 4);
  for (int i = 3; i <= 6; ++i) {
    const double h = std::ldexp(1.0, -i);
    // Euler for y' = y gives (1 + h)^(1/h) at t = 1.
    const double direct = std::abs(std::pow(1 + h, 1 / h) - std::exp(1.0));
    CHECK(rep.error_table[static_cast<std::size_t>(i - 3)].h == doctest::Approx(h));
    CHECK(rep.error_table[static_cast<std::size_t>(i - 3)].error == doctest::Approx(direct).epsilon(1e-9));
  }
}
