#include <doctest.h>

#include <cmath>
#include <limits>

#include "fellscope/closed_sets.hpp"

using namespace fellscope;

namespace {

ClosedSet1D iv(double lo, double hi) { return ClosedSet1D::interval(lo, hi); }

// Membership by brute force over the raw list.
bool raw_contains(const std::vector<Interval>& raw, double x) {
  for (const auto& r : raw) {
    if (std::min(r.lo, r.hi) <= x && x <= std::max(r.lo, r.hi)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("normalize merges and sorts") {
  CHECK(normalize({{0, 1}, {0.5, 2}}).intervals() == std::vector<Interval>{{0, 2}});
  CHECK(normalize({{1, 1}, {0, 0}}).intervals() == std::vector<Interval>{{0, 0}, {1, 1}});
  CHECK(normalize({{-1, 0}, {0, 1}}).intervals() == std::vector<Interval>{{-1, 1}});
  CHECK(normalize({{2, 1}}).intervals() == std::vector<Interval>{{1, 2}});
}

TEST_CASE("normalize agrees with pointwise membership") {
  const std::vector<Interval> raw{{-1, -0.5}, {0.25, 0.25}, {0.2, 0.6}, {3, 2}, {2.5, 4}, {-0.5, -0.4}};
  const auto s = normalize(raw);
  for (int k = -2000; k <= 5000; ++k) {
    const double x = k / 1000.0;
    CHECK(s.contains(x) == raw_contains(raw, x));
  }
}

TEST_CASE("normalize rejects non-finite endpoints") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(normalize({{0, nan}}), Error);
  CHECK_THROWS_AS(ClosedSet1D::interval(0, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("distance_to") {
  CHECK(distance_to(iv(0, 1), 2) == doctest::Approx(1));
  CHECK(distance_to(normalize({{0, 0}, {3, 4}}), 2) == doctest::Approx(1));
  CHECK(distance_to(iv(-1, 1), 0.5) == 0);
  CHECK_THROWS_AS(distance_to(ClosedSet1D{}, 0), Error);
}

TEST_CASE("dilate") {
  CHECK(dilate(ClosedSet1D::point(0), 1) == iv(-1, 1));
  CHECK(dilate(normalize({{0, 1}, {3, 4}}), 1) == iv(-1, 5));
  CHECK(dilate(iv(0, 1), 0) == iv(0, 1));
  try {
    dilate(iv(0, 1), -1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidEpsilon);
  }
}

TEST_CASE("union, intersection and nearest point") {
  CHECK(set_union(iv(0, 1), iv(1, 2)) == iv(0, 2));
  CHECK(set_intersection(iv(0, 2), iv(1, 3)) == iv(1, 2));
  CHECK(set_intersection(iv(0, 1), iv(2, 3)).empty());
  CHECK(nearest_point(normalize({{0, 1}, {3, 4}}), 2) == 1);
  CHECK(nearest_point(normalize({{0, 1}, {3, 4}}), 2.5) == 3);
}

TEST_CASE("sample_net keeps endpoints and isolated points") {
  const auto s = normalize({{0, 1}, {2, 2}});
  const auto pts = sample_net(s, 0.3);
  CHECK(std::count(pts.begin(), pts.end(), 0.0) == 1);
  CHECK(std::count(pts.begin(), pts.end(), 1.0) == 1);
  CHECK(std::count(pts.begin(), pts.end(), 2.0) == 1);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (pts[k] <= 1.0) CHECK(pts[k] - pts[k - 1] <= 0.3 + 1e-12);
  }
}

TEST_CASE("hits") {
  CHECK(hits(iv(0, 1), Region::ball(0.5, 0.1)));
  CHECK_FALSE(hits(iv(0, 1), Region::ball(3, 0.1)));
  std::vector<double> coords;
  for (int k = 0; k <= 400; ++k) {
    const double x = -2 + k * 0.01;
    coords.push_back(x);
    coords.push_back(std::tanh(5 * x));
  }
  const PointCloud graph(2, coords, Box({-2, -2}, {2, 2}), 0.01);
  CHECK(hits(graph, Region::open_box(Box({-0.1, -0.1}, {0.1, 0.1}))));
  CHECK_FALSE(hits(graph, Region::open_box(Box({-0.1, 0.5}, {0.1, 0.7}))));
}

TEST_CASE("contained_in") {
  CHECK(contained_in(iv(0, 1), Region::complement_of(iv(2, 3))));
  CHECK_FALSE(contained_in(iv(0, 3), Region::complement_of(ClosedSet1D::point(2))));
  CHECK(contained_in(ClosedSet1D::point(5), Region::complement_of(iv(-1, 1))));
  CHECK(contained_in(iv(0, 1), Region::open_dilation(iv(0, 1), 0.1)));
  CHECK_FALSE(contained_in(iv(0, 1.2), Region::open_dilation(iv(0, 1), 0.1)));
}

TEST_CASE("misses_compact") {
  CHECK(misses_compact(ClosedSet1D::point(5), iv(-1, 1)));
  CHECK_FALSE(misses_compact(iv(0, 2), ClosedSet1D::point(1)));
  CHECK_FALSE(misses_compact(iv(-1, 0), ClosedSet1D::point(0)));
  const double inf = std::numeric_limits<double>::infinity();
  try {
    misses_compact(SetValue{iv(0, 1)}, Box::interval(0, inf));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCompact);
  }
}

TEST_CASE("excess") {
  CHECK(excess(iv(0, 1), iv(0, 2)) == 0);
  CHECK(excess(iv(0, 2), iv(0, 1)) == doctest::Approx(1));
  CHECK(excess(iv(-1, 1), ClosedSet1D::point(0)) == doctest::Approx(1));
  CHECK_THROWS_AS(excess(ClosedSet1D{}, iv(0, 1)), Error);
}

TEST_CASE("point cloud excess against brute force") {
  std::vector<double> a, b;
  for (int k = 0; k < 50; ++k) {
    a.push_back(std::sin(k * 1.3));
    a.push_back(std::cos(k * 0.7));
    b.push_back(std::sin(k * 2.1) * 0.5);
    b.push_back(std::cos(k * 0.3) * 0.5);
  }
  const Box w({-2, -2}, {2, 2});
  const PointCloud ca(2, a, w, 0.01), cb(2, b, w, 0.01);
  double brute = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      best = std::min(best, std::hypot(ca.point(i)[0] - cb.point(j)[0], ca.point(i)[1] - cb.point(j)[1]));
    }
    brute = std::max(brute, best);
  }
  CHECK(excess(ca, cb) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("point index nearest distance against brute force") {
  std::vector<double> coords;
  for (int k = 0; k < 300; ++k) {
    coords.push_back(std::fmod(k * 0.618, 1.0));
    coords.push_back(std::fmod(k * 0.414, 1.0));
  }
  const PointIndex idx(2, coords);
  for (int q = 0; q < 40; ++q) {
    const std::vector<double> p{std::fmod(q * 0.37, 1.2) - 0.1, std::fmod(q * 0.73, 1.2) - 0.1};
    double best = 1e300;
    for (std::size_t i = 0; i < coords.size(); i += 2) best = std::min(best, std::hypot(coords[i] - p[0], coords[i + 1] - p[1]));
    CHECK(*idx.nearest_distance(p) == doctest::Approx(best).epsilon(1e-12));
  }
  CHECK_FALSE(PointIndex(2, std::vector<double>{}).nearest_distance(std::vector<double>{0, 0}));
}

TEST_CASE("point cloud truncation drops outside points") {
  std::size_t dropped = 0;
  const std::vector<double> coords{0, 0, 5, 5, 0.5, -0.5};
  const auto c = PointCloud::truncate(2, coords, Box({-1, -1}, {1, 1}), 0.1, &dropped);
  CHECK(c.size() == 2);
  CHECK(dropped == 1);
}

TEST_CASE("compact sets") {
  CHECK_THROWS_AS(CompactSet::box(Box::interval(0, std::numeric_limits<double>::infinity())), Error);
  const auto k = CompactSet::box(Box({0, 0}, {1, 1}));
  CHECK(k.contains(std::vector<double>{1, 1}));
  CHECK_FALSE(k.contains(std::vector<double>{1.1, 1}));
}
