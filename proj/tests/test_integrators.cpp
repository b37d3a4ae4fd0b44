#include <doctest.h>

#include <cmath>

#include "fellscope/integrators.hpp"

using namespace fellscope;

namespace {

IVProblem constant_problem(double c) {
  return {"zero", [](double, const std::vector<double>& y) { return std::vector<double>(y.size(), 0.0); }, {c}, 0.0,
          std::nullopt};
}

}  // namespace

TEST_CASE("euler by hand") {
  const auto m = integrate(exp_problem(), Method::euler(), 0.5, 1.0);
  REQUIRE(m.size() == 3);
  CHECK(m.value(0)[0] == doctest::Approx(1));
  CHECK(m.value(1)[0] == doctest::Approx(1.5));
  CHECK(m.value(2)[0] == doctest::Approx(2.25));
  CHECK(m.node(2) == doctest::Approx(1));
  CHECK_FALSE(m.truncation);
}

TEST_CASE("midpoint and rk4 single steps by hand") {
  // y' = y, h = 0.5: midpoint gives 1 + h + h^2/2, rk4 the degree-4 Taylor polynomial.
  const auto mid = integrate(exp_problem(), Method::midpoint(), 0.5, 0.5);
  CHECK(mid.value(1)[0] == doctest::Approx(1.625));
  const auto rk = integrate(exp_problem(), Method::rk4(), 0.5, 0.5);
  CHECK(rk.value(1)[0] == doctest::Approx(1 + 0.5 + 0.125 + 0.5 * 0.5 * 0.5 / 6 + 0.0625 / 24));
}

TEST_CASE("zero field keeps the initial value") {
  for (auto m : {Method::euler(), Method::midpoint(), Method::rk4()}) {
    const auto mesh = integrate(constant_problem(3.5), m, 0.1, 2.0);
    for (std::size_t k = 0; k < mesh.size(); ++k) CHECK(mesh.value(k)[0] == 3.5);
  }
}

TEST_CASE("riccati blow-up is truncated near t = 1") {
  const auto m = integrate(riccati_blowup_problem(), Method::rk4(), 0.01, 2.0);
  REQUIRE(m.truncation);
  CHECK(m.truncation->reason == Truncation::Reason::blowup_threshold);
  CHECK(m.nodes().back() < 1.01);
  double prev = 0;
  for (int i = 4; i <= 10; ++i) {
    const double h = std::ldexp(1.0, -i);
    const auto mi = integrate(riccati_blowup_problem(), Method::rk4(), h, 2.0);
    REQUIRE(mi.truncation);
    CHECK(std::abs(mi.nodes().back() - 1.0) <= 2 * h);
    CHECK(mi.nodes().back() + h >= prev);
    prev = mi.nodes().back();
  }
}

TEST_CASE("euler riccati family has shrinking domains") {
  const auto fam = refinement_family(riccati_blowup_problem(), Method::euler(), 1.0, 2.0);
  for (int i = 4; i <= 10; ++i) {
    const auto m = fam.at(i);
    CHECK(m.truncation);
    CHECK(m.nodes().back() < 2.0);
  }
}

TEST_CASE("non-finite field values stop the mesh") {
  IVProblem p{"nan", [](double t, const std::vector<double>&) { return std::vector<double>{t > 0.5 ? NAN : 1.0}; },
              {0.0}, 0.0, std::nullopt};
  const auto m = integrate(p, Method::euler(), 0.1, 1.0);
  REQUIRE(m.truncation);
  CHECK(m.truncation->reason == Truncation::Reason::field_blowup_at_step);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(std::isfinite(m.value(k)[0]));
  CHECK(to_string(m.truncation->reason) == "FieldBlowupAtStep");
}

TEST_CASE("refinement family is keyed by step") {
  const auto fam = refinement_family(exp_problem(), Method::euler(), 0.125, 1.0);
  CHECK(fam.parameter(0) == 0.125);
  CHECK(fam.parameter(3) == doctest::Approx(0.125 / 8));
  CHECK(fam.at(2).size() == 33);
}

TEST_CASE("observed orders") {
  const auto exact = *exp_problem().exact;
  const auto e = classical_test(refinement_family(exp_problem(), Method::euler(), 1.0, 1.0), exact, 1.0, {});
  CHECK(*e.order == doctest::Approx(1).epsilon(0.1));
  const auto m = classical_test(refinement_family(exp_problem(), Method::midpoint(), 1.0, 1.0), exact, 1.0, {});
  CHECK(*m.order == doctest::Approx(2).epsilon(0.1));
  const auto r = classical_test(refinement_family(exp_problem(), Method::rk4(), 1.0, 1.0), exact, 1.0, {});
  CHECK(*r.order == doctest::Approx(4).epsilon(0.05));
  CHECK(r.verdict.passed());
}

TEST_CASE("oscillator rk4 order and energy") {
  const auto p = oscillator_problem();
  const auto fam = refinement_family(p, Method::rk4(), 1.0, 4.0);
  const auto rep = classical_test(fam, *p.exact, 4.0, {3, 8, 1e-2});
  CHECK(*rep.order == doctest::Approx(4).epsilon(0.05));
  double prev = 1e300;
  for (int i = 3; i <= 8; ++i) {
    const auto m = fam.at(i);
    const auto y = m.value(m.size() - 1);
    const double drift = std::abs(y[0] * y[0] + y[1] * y[1] - 1);
    CHECK(drift <= prev);
    prev = drift;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("problem library") {
  CHECK(problem_by_name("exp").name == "exp");
  CHECK(problem_by_name("riccati_blowup").dim() == 1);
  CHECK(problem_by_name("oscillator").dim() == 2);
  CHECK_THROWS_AS(problem_by_name("nope"), Error);
  CHECK(Method::from_string("rk4").order == 4);
  CHECK_THROWS_AS(Method::from_string("nope"), Error);
  for (const char* n : {"exp", "oscillator"}) CHECK(exact_residual(problem_by_name(n), 1.0) < 1e-5);
}
