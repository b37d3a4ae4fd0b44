#include "fellscope/closed_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fellscope {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void require_dim(std::size_t have, std::size_t want, const char* what) {
  if (have != want) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(want) + ", got " +
                                                  std::to_string(have));
  }
}

/// Open 1-D interval view of a region, when it has one.
std::optional<std::vector<Interval>> as_open_intervals(const Region& u) {
  return std::visit(
      overloaded{
          [](const Region::OpenBox& b) -> std::optional<std::vector<Interval>> {
            require_dim(b.box.dim(), 1, "open box");
            return std::vector<Interval>{{b.box.lo[0], b.box.hi[0]}};
          },
          [](const Region::OpenBall& b) -> std::optional<std::vector<Interval>> {
            require_dim(b.center.size(), 1, "ball");
            return std::vector<Interval>{{b.center[0] - b.radius, b.center[0] + b.radius}};
          },
          [](const Region::OpenIntervals& o) -> std::optional<std::vector<Interval>> {
            return o.intervals;
          },
          [](const Region::BallUnion& b) -> std::optional<std::vector<Interval>> {
            if (!b.centers->empty()) require_dim(b.centers->dim(), 1, "ball union");
            std::vector<Interval> raw;
            for (std::size_t i = 0; i < b.centers->size(); ++i) {
              const double c = b.centers->point(i)[0];
              raw.push_back({c - b.radius, c + b.radius});
            }
            auto merged = Region::open_intervals(std::move(raw));
            return std::get<Region::OpenIntervals>(merged.shape()).intervals;
          },
          [](const auto&) -> std::optional<std::vector<Interval>> { return std::nullopt; },
      },
      u.shape());
}

std::optional<Interval> compact_interval(const CompactSet& k) {
  if (const auto* b = std::get_if<CompactSet::ClosedBox>(&k.shape())) {
    require_dim(b->box.dim(), 1, "compact box");
    return Interval{b->box.lo[0], b->box.hi[0]};
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// ClosedSet1D

ClosedSet1D ClosedSet1D::point(double x) { return normalize({{x, x}}); }

ClosedSet1D ClosedSet1D::interval(double lo, double hi) { return normalize({{lo, hi}}); }

double ClosedSet1D::min() const {
  if (empty()) throw Error(ErrorKind::EmptySet, "min of empty set");
  return intervals_.front().lo;
}

double ClosedSet1D::max() const {
  if (empty()) throw Error(ErrorKind::EmptySet, "max of empty set");
  return intervals_.back().hi;
}

bool ClosedSet1D::contains(double x, double tol) const {
  auto it = std::lower_bound(intervals_.begin(), intervals_.end(), x - tol,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  return it != intervals_.end() && it->lo <= x + tol;
}

ClosedSet1D normalize(std::vector<Interval> raw) {
  for (auto& iv : raw) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw Error(ErrorKind::InvalidEndpoint, "interval endpoints must be finite");
    }
    if (iv.lo > iv.hi) std::swap(iv.lo, iv.hi);
  }
  std::sort(raw.begin(), raw.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  std::vector<Interval> out;
  out.reserve(raw.size());
  for (const auto& iv : raw) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return ClosedSet1D(std::move(out));
}

double distance_to(const ClosedSet1D& set, double x) {
  if (set.empty()) throw Error(ErrorKind::EmptySet, "distance to empty set");
  const auto& ivs = set.intervals();
  auto it = std::lower_bound(ivs.begin(), ivs.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  double best = std::numeric_limits<double>::infinity();
  if (it != ivs.end()) best = std::max(0.0, it->lo - x);
  if (it != ivs.begin()) best = std::min(best, x - std::prev(it)->hi);
  return best;
}

double nearest_point(const ClosedSet1D& set, double x) {
  if (set.empty()) throw Error(ErrorKind::EmptySet, "nearest point of empty set");
  const auto& ivs = set.intervals();
  auto it = std::lower_bound(ivs.begin(), ivs.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  if (it != ivs.end() && it->lo <= x) return x;
  double best = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  if (it != ivs.begin()) {
    best = std::prev(it)->hi;
    best_d = x - best;
  }
  if (it != ivs.end() && it->lo - x < best_d) best = it->lo;
  return best;
}

ClosedSet1D dilate(const ClosedSet1D& set, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidEpsilon, "dilation radius must be >= 0");
  if (eps == 0.0) return set;
  std::vector<Interval> raw;
  raw.reserve(set.size());
  for (const auto& iv : set.intervals()) raw.push_back({iv.lo - eps, iv.hi + eps});
  return normalize(std::move(raw));
}

ClosedSet1D set_union(const ClosedSet1D& a, const ClosedSet1D& b) {
  std::vector<Interval> raw = a.intervals();
  raw.insert(raw.end(), b.intervals().begin(), b.intervals().end());
  return normalize(std::move(raw));
}

ClosedSet1D set_intersection(const ClosedSet1D& a, const ClosedSet1D& b) {
  std::vector<Interval> out;
  const auto& x = a.intervals();
  const auto& y = b.intervals();
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].lo, y[j].lo);
    const double hi = std::min(x[i].hi, y[j].hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (x[i].hi < y[j].hi) ++i; else ++j;
  }
  return normalize(std::move(out));
}

std::vector<double> sample_net(const ClosedSet1D& set, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "net spacing must be > 0");
  std::vector<double> out;
  for (const auto& iv : set.intervals()) {
    const double len = iv.hi - iv.lo;
    const auto steps = static_cast<std::size_t>(std::ceil(len / spacing - 1e-12));
    if (steps == 0) {
      out.push_back(iv.lo);
      continue;
    }
    for (std::size_t k = 0; k <= steps; ++k) {
      out.push_back(k == steps ? iv.hi : iv.lo + len * static_cast<double>(k) / static_cast<double>(steps));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Box, PointCloud

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw Error(ErrorKind::DimensionMismatch, "box bounds differ in dimension");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i])) throw Error(ErrorKind::InvalidEndpoint, "NaN box bound");
    if (lo[i] > hi[i]) std::swap(lo[i], hi[i]);
  }
}

bool Box::bounded() const {
  return std::all_of(lo.begin(), lo.end(), [](double v) { return std::isfinite(v); }) &&
         std::all_of(hi.begin(), hi.end(), [](double v) { return std::isfinite(v); });
}

bool Box::contains(std::span<const double> p, double tol) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  }
  return true;
}

double Box::depth(std::span<const double> p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lo.size(); ++i) {
    d = std::min({d, p[i] - lo[i], hi[i] - p[i]});
  }
  return std::max(d, 0.0);
}

PointCloud::PointCloud(std::size_t dim, Box window, double resolution)
    : PointCloud(dim, {}, std::move(window), resolution) {}

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords, Box window, double resolution)
    : dim_(dim), coords_(std::move(coords)), window_(std::move(window)), resolution_(resolution) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidConfig, "point cloud dimension must be positive");
  if (!(resolution_ > 0.0)) throw Error(ErrorKind::InvalidConfig, "point cloud resolution must be > 0");
  require_dim(window_.dim(), dim_, "point cloud window");
  if (coords_.size() % dim_ != 0) throw Error(ErrorKind::DimensionMismatch, "coordinate buffer not a multiple of dim");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidEndpoint, "non-finite point coordinate");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!window_.contains(point(i), default_tol)) {
      throw Error(ErrorKind::InvalidConfig, "point cloud point outside its window");
    }
  }
}

PointCloud PointCloud::truncate(std::size_t dim, std::span<const double> coords, Box window,
                                double resolution, std::size_t* dropped) {
  std::vector<double> kept;
  kept.reserve(coords.size());
  std::size_t n_dropped = 0;
  for (std::size_t i = 0; i + dim <= coords.size(); i += dim) {
    auto p = coords.subspan(i, dim);
    bool finite = std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
    if (finite && window.contains(p)) {
      kept.insert(kept.end(), p.begin(), p.end());
    } else {
      ++n_dropped;
    }
  }
  if (dropped) *dropped = n_dropped;
  return PointCloud(dim, std::move(kept), std::move(window), resolution);
}

// ---------------------------------------------------------------------------
// Region

Region Region::complement_of(ClosedSet1D removed) { return Region(Complement{std::move(removed)}); }

Region Region::open_box(Box box) { return Region(OpenBox{std::move(box)}); }

Region Region::ball(std::vector<double> center, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorKind::InvalidEpsilon, "ball radius must be >= 0");
  return Region(OpenBall{std::move(center), radius});
}

Region Region::open_intervals(std::vector<Interval> intervals) {
  std::vector<Interval> kept;
  for (auto iv : intervals) {
    if (iv.lo > iv.hi) std::swap(iv.lo, iv.hi);
    if (iv.lo < iv.hi) kept.push_back(iv);
  }
  std::sort(kept.begin(), kept.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : kept) {
    // Open intervals sharing only an endpoint stay separate: the endpoint is
    // in neither.
    if (!out.empty() && iv.lo < out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return Region(OpenIntervals{std::move(out)});
}

Region Region::open_dilation(const ClosedSet1D& set, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "open dilation needs eps > 0");
  std::vector<Interval> raw;
  for (const auto& iv : set.intervals()) raw.push_back({iv.lo - eps, iv.hi + eps});
  return open_intervals(std::move(raw));
}

Region Region::ball_union(PointCloud centers, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorKind::InvalidEpsilon, "ball radius must be >= 0");
  auto cloud = std::make_shared<const PointCloud>(std::move(centers));
  auto index = std::make_shared<const PointIndex>(*cloud);
  return Region(BallUnion{std::move(cloud), radius, std::move(index)});
}

Region Region::funnel(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidConfig, "funnel constant must be > 0");
  return Region(Funnel{c});
}

std::string_view Region::kind() const {
  return std::visit(overloaded{
                        [](const Complement&) { return std::string_view("complement"); },
                        [](const OpenBox&) { return std::string_view("box"); },
                        [](const OpenBall&) { return std::string_view("ball"); },
                        [](const OpenIntervals&) { return std::string_view("open_intervals"); },
                        [](const BallUnion&) { return std::string_view("ball_union"); },
                        [](const Funnel&) { return std::string_view("funnel"); },
                    },
                    shape_);
}

std::optional<std::size_t> Region::dim() const {
  return std::visit(overloaded{
                        [](const Complement&) -> std::optional<std::size_t> { return 1; },
                        [](const OpenBox& b) -> std::optional<std::size_t> { return b.box.dim(); },
                        [](const OpenBall& b) -> std::optional<std::size_t> { return b.center.size(); },
                        [](const OpenIntervals&) -> std::optional<std::size_t> { return 1; },
                        [](const BallUnion& b) -> std::optional<std::size_t> {
                          if (b.centers->empty()) return std::nullopt;
                          return b.centers->dim();
                        },
                        [](const Funnel&) -> std::optional<std::size_t> { return 2; },
                    },
                    shape_);
}

bool Region::contains(std::span<const double> p, double tol) const {
  if (auto d = dim()) require_dim(p.size(), *d, "region membership");
  return std::visit(
      overloaded{
          [&](const Complement& c) {
            const double x = p[0];
            const auto& ivs = c.removed.intervals();
            auto it = std::lower_bound(ivs.begin(), ivs.end(), x,
                                       [](const Interval& iv, double v) { return iv.hi < v; });
            if (it == ivs.end() || it->lo > x) return true;
            return std::min(x - it->lo, it->hi - x) <= tol;
          },
          [&](const OpenBox& b) {
            for (std::size_t i = 0; i < p.size(); ++i) {
              if (!(p[i] > b.box.lo[i] - tol && p[i] < b.box.hi[i] + tol)) return false;
            }
            return true;
          },
          [&](const OpenBall& b) { return std::sqrt(sq_dist(p, b.center)) < b.radius + tol; },
          [&](const OpenIntervals& o) {
            const double x = p[0];
            auto it = std::lower_bound(o.intervals.begin(), o.intervals.end(), x - tol,
                                       [](const Interval& iv, double v) { return iv.hi <= v; });
            return it != o.intervals.end() && it->lo - tol < x;
          },
          [&](const BallUnion& b) {
            auto d = b.index->nearest_distance(p);
            return d && *d < b.radius + tol;
          },
          [&](const Funnel& f) { return std::abs(p[0] * p[1]) < f.c + tol; },
      },
      shape_);
}

// ---------------------------------------------------------------------------
// CompactSet

CompactSet CompactSet::intervals(ClosedSet1D set) { return CompactSet(Intervals{std::move(set)}); }

CompactSet CompactSet::box(Box b) {
  if (!b.bounded()) throw Error(ErrorKind::NotCompact, "control set must be a bounded box");
  return CompactSet(ClosedBox{std::move(b)});
}

CompactSet CompactSet::box_minus_balls(Box b, PointCloud centers, double radius) {
  if (!b.bounded()) throw Error(ErrorKind::NotCompact, "control set must be a bounded box");
  if (!centers.empty()) require_dim(centers.dim(), b.dim(), "box minus balls");
  auto cloud = std::make_shared<const PointCloud>(std::move(centers));
  auto index = std::make_shared<const PointIndex>(*cloud);
  return CompactSet(BoxMinusBalls{std::move(b), std::move(cloud), radius, std::move(index)});
}

std::string_view CompactSet::kind() const {
  return std::visit(overloaded{
                        [](const Intervals&) { return std::string_view("intervals"); },
                        [](const ClosedBox&) { return std::string_view("box"); },
                        [](const BoxMinusBalls&) { return std::string_view("box_minus_balls"); },
                    },
                    shape_);
}

bool CompactSet::contains(std::span<const double> p, double tol) const {
  return std::visit(overloaded{
                        [&](const Intervals& k) {
                          require_dim(p.size(), 1, "compact membership");
                          return k.set.contains(p[0], tol);
                        },
                        [&](const ClosedBox& k) {
                          require_dim(p.size(), k.box.dim(), "compact membership");
                          return k.box.contains(p, tol);
                        },
                        [&](const BoxMinusBalls& k) {
                          require_dim(p.size(), k.box.dim(), "compact membership");
                          if (!k.box.contains(p, tol)) return false;
                          auto d = k.index->nearest_distance(p);
                          return !d || *d >= k.radius - tol;
                        },
                    },
                    shape_);
}

// ---------------------------------------------------------------------------
// Predicates

bool is_empty(const SetValue& s) {
  return std::visit([](const auto& v) { return v.empty(); }, s);
}

bool hits(const ClosedSet1D& set, const Region& v, double /*tol*/) {
  if (set.empty()) return false;
  if (const auto* c = std::get_if<Region::Complement>(&v.shape())) {
    // Hits R \ C iff the set is not inside C.
    return !(set_intersection(set, c->removed) == set);
  }
  auto open = as_open_intervals(v);
  if (!open) throw Error(ErrorKind::DimensionMismatch, "region is not one-dimensional");
  for (const auto& iv : set.intervals()) {
    for (const auto& o : *open) {
      if (iv.lo < o.hi && iv.hi > o.lo) return true;
    }
  }
  return false;
}

bool hits(const PointCloud& set, const Region& v, double tol) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (v.contains(set.point(i), tol)) return true;
  }
  return false;
}

bool hits(const SetValue& set, const Region& v, double tol) {
  return std::visit([&](const auto& s) { return hits(s, v, tol); }, set);
}

bool contained_in(const ClosedSet1D& set, const Region& u) {
  if (set.empty()) return true;
  if (const auto* c = std::get_if<Region::Complement>(&u.shape())) {
    return set_intersection(set, c->removed).empty();
  }
  auto open = as_open_intervals(u);
  if (!open) throw Error(ErrorKind::DimensionMismatch, "region is not one-dimensional");
  for (const auto& iv : set.intervals()) {
    auto it = std::upper_bound(open->begin(), open->end(), iv.lo,
                               [](double v, const Interval& o) { return v < o.hi; });
    if (it == open->end() || !(it->lo < iv.lo && iv.hi < it->hi)) return false;
  }
  return true;
}

bool contained_in(const PointCloud& set, const Region& u) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!u.contains(set.point(i))) return false;
  }
  return true;
}

bool contained_in(const SetValue& set, const Region& u) {
  return std::visit([&](const auto& s) { return contained_in(s, u); }, set);
}

ClosedSet1D restrict_to(const ClosedSet1D& set, const CompactSet& k) {
  if (const auto* iv = std::get_if<CompactSet::Intervals>(&k.shape())) {
    return set_intersection(set, iv->set);
  }
  if (auto box = compact_interval(k)) {
    return set_intersection(set, ClosedSet1D::interval(box->lo, box->hi));
  }
  throw Error(ErrorKind::DimensionMismatch, "compact set is not one-dimensional");
}

PointCloud restrict_to(const PointCloud& set, const CompactSet& k, double tol) {
  std::vector<double> kept;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto p = set.point(i);
    if (k.contains(p, tol)) kept.insert(kept.end(), p.begin(), p.end());
  }
  return PointCloud(set.dim(), std::move(kept), set.window(), set.resolution());
}

bool misses_compact(const ClosedSet1D& set, const CompactSet& k, double /*tol*/) {
  return restrict_to(set, k).empty();
}

bool misses_compact(const PointCloud& set, const CompactSet& k, double tol) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (k.contains(set.point(i), tol)) return false;
  }
  return true;
}

bool misses_compact(const SetValue& set, const CompactSet& k, double tol) {
  return std::visit([&](const auto& s) { return misses_compact(s, k, tol); }, set);
}

bool misses_compact(const ClosedSet1D& set, const ClosedSet1D& k, double tol) {
  return misses_compact(set, CompactSet::intervals(k), tol);
}

bool misses_compact(const SetValue& set, const Box& k, double tol) {
  return misses_compact(set, CompactSet::box(k), tol);
}

// ---------------------------------------------------------------------------
// Excess

namespace {

/// Maximizer of distance-to-b over a: the maximum over each interval of a is
/// attained at an endpoint or at the midpoint of a gap of b.
std::pair<double, double> excess_1d(const ClosedSet1D& a, const ClosedSet1D& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySet, "excess needs nonempty operands");
  double best = -1.0;
  double arg = a.min();
  auto consider = [&](double x) {
    const double d = distance_to(b, x);
    if (d > best) {
      best = d;
      arg = x;
    }
  };
  const auto& bi = b.intervals();
  for (const auto& iv : a.intervals()) {
    consider(iv.lo);
    consider(iv.hi);
    for (std::size_t j = 0; j + 1 < bi.size(); ++j) {
      const double mid = 0.5 * (bi[j].hi + bi[j + 1].lo);
      if (mid > iv.lo && mid < iv.hi) consider(mid);
    }
  }
  return {best, arg};
}

std::pair<double, std::size_t> excess_cloud(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySet, "excess needs nonempty operands");
  require_dim(b.dim(), a.dim(), "excess");
  PointIndex index(b);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = *index.nearest_distance(a.point(i));
    if (d > best) {
      best = d;
      arg = i;
    }
  }
  return {best, arg};
}

}  // namespace

double excess(const ClosedSet1D& a, const ClosedSet1D& b) { return excess_1d(a, b).first; }

double excess(const PointCloud& a, const PointCloud& b) { return excess_cloud(a, b).first; }

double excess(const SetValue& a, const SetValue& b) {
  return std::visit(
      overloaded{
          [](const ClosedSet1D& x, const ClosedSet1D& y) { return excess(x, y); },
          [](const PointCloud& x, const PointCloud& y) { return excess(x, y); },
          [](const auto&, const auto&) -> double {
            throw Error(ErrorKind::DimensionMismatch, "excess between different set kinds");
          },
      },
      a, b);
}

std::vector<double> excess_witness(const SetValue& a, const SetValue& b) {
  return std::visit(
      overloaded{
          [](const ClosedSet1D& x, const ClosedSet1D& y) {
            return std::vector<double>{excess_1d(x, y).second};
          },
          [](const PointCloud& x, const PointCloud& y) {
            auto p = x.point(excess_cloud(x, y).second);
            return std::vector<double>(p.begin(), p.end());
          },
          [](const auto&, const auto&) -> std::vector<double> {
            throw Error(ErrorKind::DimensionMismatch, "excess between different set kinds");
          },
      },
      a, b);
}

}  // namespace fellscope
