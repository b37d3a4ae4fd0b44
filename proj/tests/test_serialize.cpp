#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fellscope/integrators.hpp"
#include "fellscope/scenarios.hpp"
#include "fellscope/serialize.hpp"
#include "fellscope/transform.hpp"

using namespace fellscope;

TEST_CASE("number formatting and dump") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  const Json j{{"a", 1.0 / 3.0}, {"b", std::numeric_limits<double>::infinity()}, {"c", 2}};
  const auto back = Json::parse(dump(j));
  CHECK(back["a"].get<double>() == 0.333333333333);
  CHECK(back["b"] == "inf");
  CHECK(back["c"] == 2);
  CHECK(dump(j) == dump(back));
}

TEST_CASE("topology json") {
  const auto t1 = generate_topology(FiniteCriterion(3, {{1, 2}, {2, 3}}));
  CHECK(to_json(t1) == Json::parse(R"({"opens": [[], [1], [1, 2], [1, 2, 3]]})"));
  CHECK(topology_from_json(to_json(t1)) == t1);
  const FiniteCriterion c(3, {{1, 2}});
  CHECK(criterion_from_json(to_json(c)) == c);
  CHECK_THROWS_AS(topology_from_json(Json::parse(R"({"opens": [[1]]})")), Error);
}

TEST_CASE("closed set, box and mesh round trips") {
  const auto s = normalize({{0, 1}, {2, 2}});
  CHECK(closed_set_from_json(to_json(s)) == s);
  const Box b({0, -1}, {1, 1});
  CHECK(box_from_json(to_json(b)) == b);
  const auto m = integrate(exp_problem(), Method::euler(), 0.25, 1.0);
  const auto back = mesh_from_json(to_json(m));
  CHECK(back.nodes() == m.nodes());
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(back.value(k)[0] == doctest::Approx(m.value(k)[0]).epsilon(1e-11));
}

TEST_CASE("config overrides") {
  EstimationConfig base;
  const auto c = apply_config(base, Json::parse(R"({"eps": 0.05, "n1": 99, "window": {"lo": [-1], "hi": [1]}})"));
  CHECK(c.eps == 0.05);
  CHECK(c.n1 == 99);
  CHECK(c.n0 == base.n0);
  CHECK(c.window == Box::interval(-1, 1));
  try {
    apply_config(base, Json::parse(R"({"epsilon": 0.05})"));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
}

TEST_CASE("classical error table as csv") {
  const auto p = exp_problem();
  const auto rep = classical_test(refinement_family(p, Method::euler(), 1.0, 1.0), *p.exact, 1.0, {});
  const auto csv = emit_report(rep, Format::csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "h,E");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    const double h = std::stod(line.substr(0, comma));
    CHECK(h == doctest::Approx(std::ldexp(1.0, -(3 + rows))));
    ++rows;
  }
  CHECK(rows == 8);
  CHECK(emit_report(rep, Format::svg).find("<svg") != std::string::npos);
}

TEST_CASE("unsupported report formats") {
  ConvergenceReport rep;
  rep.criterion = Criterion::fell2;
  CHECK_THROWS_AS(emit_report(rep, Format::csv), Error);
  CHECK_THROWS_AS(emit_report(Verdict{}, Format::svg), Error);
  CHECK_NOTHROW(emit_report(Verdict{}, Format::json));
}

TEST_CASE("set plot renders a cloud") {
  std::vector<double> coords;
  for (int k = 0; k < 50; ++k) {
    coords.push_back(k * 0.02);
    coords.push_back(std::tanh(k * 0.02));
  }
  const SetValue cloud = PointCloud(2, coords, Box({0, 0}, {1, 1}), 0.02);
  const auto svg = emit_report(cloud, Format::svg);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "fellscope_write_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.json";
  write_atomic(path, "first");
  write_atomic(path, "second");
  std::ifstream in(path);
  std::string text;
  std::getline(in, text);
  CHECK(text == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shifted cube") {
  const ShiftedCube phi(-2, 2);
  CHECK(phi(-2) == doctest::Approx(-2));
  CHECK(phi(2) == doctest::Approx(2));
  for (int k = -40; k <= 40; ++k) {
    const double t = k * 0.1;
    CHECK(phi.inverse(phi(t)) == doctest::Approx(t).epsilon(1e-12));
    if (k > -40) CHECK(phi(t) > phi(t - 0.1));
  }
  // Slopes on the window stay within [3/7, 12/7].
  for (int k = 0; k < 40; ++k) {
    const double t = -2 + k * 0.1;
    const double slope = (phi(t + 0.1) - phi(t)) / 0.1;
    CHECK(slope >= 3.0 / 7 - 1e-9);
    CHECK(slope <= 12.0 / 7 + 1e-9);
  }
  CHECK(unsquash(squash(0.7)) == doctest::Approx(0.7));
  CHECK(std::abs(squash(1e9)) < M_PI);
}

TEST_CASE("graph homeomorphism round trip") {
  const GraphHomeomorphism h{ShiftedCube(0, 1), true};
  const std::vector<double> p{0.3, -2.5};
  const auto q = h.forward(p);
  CHECK(q[1] == doctest::Approx(2 * std::atan(-2.5)));
  const auto back = h.backward(q);
  CHECK(back[0] == doctest::Approx(0.3));
  CHECK(back[1] == doctest::Approx(-2.5));
}

TEST_CASE("scenario registry") {
  const auto& reg = scenario_registry();
  std::vector<std::string> names;
  for (const auto& s : reg) names.push_back(s.name);
  CHECK(names == std::vector<std::string>{"alternating_interval", "g_family_ladder", "tanh_graph_limit",
                                          "escaping_point", "funnel_windowed", "euler_exp", "rk4_oscillator",
                                          "riccati_blowup", "finite_gamma12", "topology_census"});
  try {
    find_scenario("nope");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownScenario);
  }
  CHECK(scenario_seed("a") != scenario_seed("b"));
  CHECK(scenario_seed("a") == scenario_seed("a"));
}

TEST_CASE("scenario reports are deterministic") {
  const auto& s = find_scenario("alternating_interval");
  const auto a = dump(to_json(s.run({})));
  const auto b = dump(to_json(s.run({})));
  CHECK(a == b);
  const auto rep = s.run({});
  CHECK(rep.as_expected());
  CHECK(rep.verdict("kp_vs_{0}").status == Status::fail);
}

TEST_CASE("scenario eps override keeps expectations on the alternating interval") {
  ScenarioOptions opt;
  opt.eps = 0.04;
  CHECK(find_scenario("alternating_interval").run(opt).as_expected());
}

TEST_CASE("euler_exp exports table and plot") {
  const auto rep = find_scenario("euler_exp").run({});
  CHECK(rep.as_expected());
  CHECK(emit_report(rep, Format::csv).rfind("h,E", 0) == 0);
  CHECK(emit_report(rep, Format::svg).find("<svg") != std::string::npos);
  CHECK_THROWS_AS(emit_report(find_scenario("finite_gamma12").run({}), Format::csv), Error);
}
