#include "fellscope/kuratowski.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace fellscope {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t max_witnesses = 8;

/// Candidate grid over the estimation window: points lo + k * pitch per axis.
class Grid {
 public:
  Grid(const Box& window, double pitch) : window_(window), pitch_(pitch) {
    if (!window.bounded()) throw Error(ErrorKind::BadWindow, "estimation window must be bounded");
    for (std::size_t d = 0; d < window.dim(); ++d) {
      const auto n = static_cast<std::int64_t>(std::floor((window.hi[d] - window.lo[d]) / pitch + 1e-9));
      counts_.push_back(n + 1);
    }
  }

  std::size_t dim() const { return counts_.size(); }
  std::int64_t count(std::size_t d) const { return counts_[d]; }

  double coord(std::size_t d, std::int64_t k) const {
    return std::min(window_.lo[d] + static_cast<double>(k) * pitch_, window_.hi[d]);
  }

  /// Index range of grid coordinates in [a, b] along axis d, clipped.
  std::pair<std::int64_t, std::int64_t> range(std::size_t d, double a, double b) const {
    auto lo = static_cast<std::int64_t>(std::ceil((a - window_.lo[d]) / pitch_ - 1e-9));
    auto hi = static_cast<std::int64_t>(std::floor((b - window_.lo[d]) / pitch_ + 1e-9));
    return {std::max<std::int64_t>(lo, 0), std::min<std::int64_t>(hi, counts_[d] - 1)};
  }

  /// Row-major key with the first axis most significant, so sorted keys
  /// enumerate columns of constant first coordinate contiguously.
  std::uint64_t key(std::span<const std::int64_t> k) const {
    std::uint64_t out = 0;
    for (std::size_t d = 0; d < k.size(); ++d) {
      out = out * static_cast<std::uint64_t>(counts_[d]) + static_cast<std::uint64_t>(k[d]);
    }
    return out;
  }

  std::vector<std::int64_t> decode(std::uint64_t key) const {
    std::vector<std::int64_t> k(counts_.size());
    for (std::size_t d = counts_.size(); d-- > 0;) {
      k[d] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(counts_[d]));
      key /= static_cast<std::uint64_t>(counts_[d]);
    }
    return k;
  }

 private:
  Box window_;
  double pitch_;
  std::vector<std::int64_t> counts_;
};

/// Per grid point: how many tail indices came within eps.
class Raster {
 public:
  explicit Raster(const Grid& grid) : grid_(grid) {}

  void begin_index(int i) { current_ = i; }

  void mark(std::uint64_t key) {
    auto& cell = cells_[key];
    if (cell.last != current_) {
      cell.last = current_;
      ++cell.count;
    }
  }

  void mark_set(const ClosedSet1D& set, double eps) {
    const auto fat = dilate(set, eps);
    for (const auto& iv : fat.intervals()) {
      auto [lo, hi] = grid_.range(0, iv.lo - default_tol, iv.hi + default_tol);
      for (std::int64_t k = lo; k <= hi; ++k) mark(static_cast<std::uint64_t>(k));
    }
  }

  void mark_set(const PointCloud& set, double eps) {
    const std::size_t dim = grid_.dim();
    if (set.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "sequence dimension differs from window");
    std::vector<std::int64_t> lo(dim), hi(dim), k(dim);
    const double r2 = (eps + default_tol) * (eps + default_tol);
    for (std::size_t i = 0; i < set.size(); ++i) {
      auto p = set.point(i);
      bool empty = false;
      for (std::size_t d = 0; d < dim; ++d) {
        std::tie(lo[d], hi[d]) = grid_.range(d, p[d] - eps - default_tol, p[d] + eps + default_tol);
        empty = empty || lo[d] > hi[d];
      }
      if (empty) continue;
      k = lo;
      while (true) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = grid_.coord(d, k[d]) - p[d];
          s += diff * diff;
        }
        if (s <= r2) mark(grid_.key(k));
        std::size_t d = dim;
        while (d-- > 0) {
          if (++k[d] <= hi[d]) break;
          k[d] = lo[d];
        }
        if (d == static_cast<std::size_t>(-1)) break;
      }
    }
  }

  std::vector<std::uint64_t> keys_with_count(int at_least) const {
    std::vector<std::uint64_t> out;
    for (const auto& [key, cell] : cells_) {
      if (cell.count >= at_least) out.push_back(key);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Cell {
    int last = std::numeric_limits<int>::min();
    int count = 0;
  };
  const Grid& grid_;
  int current_ = 0;
  std::unordered_map<std::uint64_t, Cell> cells_;
};

SetValue materialize(const Grid& grid, const std::vector<std::uint64_t>& keys, SetKind kind,
                     const EstimationConfig& cfg) {
  if (kind == SetKind::one_d) {
    std::vector<Interval> runs;
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j + 1 < keys.size() && keys[j + 1] == keys[j] + 1) ++j;
      runs.push_back({grid.coord(0, static_cast<std::int64_t>(keys[i])),
                      grid.coord(0, static_cast<std::int64_t>(keys[j]))});
      i = j + 1;
    }
    return normalize(std::move(runs));
  }
  std::vector<double> coords;
  coords.reserve(keys.size() * grid.dim());
  for (auto key : keys) {
    auto k = grid.decode(key);
    for (std::size_t d = 0; d < grid.dim(); ++d) coords.push_back(grid.coord(d, k[d]));
  }
  return PointCloud(grid.dim(), std::move(coords), cfg.window, cfg.grid_pitch);
}

/// Sample points of a set used to look for violations.
std::vector<std::vector<double>> sample_points(const SetValue& s, double pitch) {
  std::vector<std::vector<double>> out;
  std::visit(overloaded{
                 [&](const ClosedSet1D& set) {
                   for (double x : sample_net(set, pitch)) out.push_back({x});
                 },
                 [&](const PointCloud& cloud) {
                   for (std::size_t i = 0; i < cloud.size(); ++i) {
                     auto p = cloud.point(i);
                     out.emplace_back(p.begin(), p.end());
                   }
                 },
             },
             s);
  return out;
}

/// Distance oracle to a fixed set; +inf for the empty set.
class DistanceTo {
 public:
  explicit DistanceTo(const SetValue& s) : set_(s) {
    if (const auto* c = std::get_if<PointCloud>(&s)) index_.emplace(*c);
  }
  double operator()(std::span<const double> p) const {
    if (const auto* c = std::get_if<ClosedSet1D>(&set_)) {
      return c->empty() ? std::numeric_limits<double>::infinity() : distance_to(*c, p[0]);
    }
    auto d = index_->nearest_distance(p);
    return d ? *d : std::numeric_limits<double>::infinity();
  }

 private:
  const SetValue& set_;
  std::optional<PointIndex> index_;
};

struct Violation {
  std::vector<double> point;
  double score;
  std::string clause;
};

/// A few well-separated representatives, worst first.
std::vector<Violation> spread(std::vector<Violation> v, double separation) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) { return a.score > b.score; });
  std::vector<Violation> out;
  for (auto& cand : v) {
    bool far = std::all_of(out.begin(), out.end(), [&](const Violation& w) {
      if (w.clause != cand.clause) return true;
      double s = 0.0;
      for (std::size_t d = 0; d < w.point.size(); ++d) s += (w.point[d] - cand.point[d]) * (w.point[d] - cand.point[d]);
      return std::sqrt(s) >= separation;
    });
    if (far) out.push_back(std::move(cand));
    if (out.size() == max_witnesses) break;
  }
  return out;
}

/// Window-boundary contamination: every representative within eps of the
/// window boundary downgrades a failure to inconclusive.
Verdict classify(std::vector<Violation> violations, const EstimationConfig& cfg) {
  Verdict v;
  if (violations.empty()) return v;
  auto reps = spread(std::move(violations), 4.0 * cfg.eps);
  std::stable_partition(reps.begin(), reps.end(),
                        [&](const Violation& w) { return cfg.window.depth(w.point) > cfg.eps; });
  const bool interior = cfg.window.depth(reps.front().point) > cfg.eps;
  v.status = interior ? Status::fail : Status::inconclusive;
  for (auto& r : reps) v.witnesses.push_back({std::nullopt, std::move(r.point), std::move(r.clause)});
  return v;
}

std::vector<double> representative_point(const Region& r) {
  return std::visit(overloaded{
                        [](const Region::OpenBall& b) { return b.center; },
                        [](const Region::OpenBox& b) {
                          std::vector<double> c(b.box.dim());
                          for (std::size_t d = 0; d < c.size(); ++d) c[d] = 0.5 * (b.box.lo[d] + b.box.hi[d]);
                          return c;
                        },
                        [](const Region::OpenIntervals& o) {
                          if (o.intervals.empty()) return std::vector<double>{};
                          return std::vector<double>{0.5 * (o.intervals[0].lo + o.intervals[0].hi)};
                        },
                        [](const Region::BallUnion& b) {
                          if (b.centers->empty()) return std::vector<double>{};
                          auto p = b.centers->point(0);
                          return std::vector<double>(p.begin(), p.end());
                        },
                        [](const auto&) { return std::vector<double>{}; },
                    },
                    r.shape());
}

/// [lo, hi] minus an open 1-D region, as a closed set.
ClosedSet1D closed_complement_within(const Region& u, double lo, double hi) {
  const ClosedSet1D hull = ClosedSet1D::interval(lo, hi);
  if (const auto* c = std::get_if<Region::Complement>(&u.shape())) {
    return set_intersection(hull, c->removed);
  }
  std::vector<Interval> open;
  std::visit(overloaded{
                 [&](const Region::OpenIntervals& o) { open = o.intervals; },
                 [&](const Region::OpenBox& b) { open = {{b.box.lo[0], b.box.hi[0]}}; },
                 [&](const Region::OpenBall& b) { open = {{b.center[0] - b.radius, b.center[0] + b.radius}}; },
                 [&](const Region::BallUnion& b) {
                   for (std::size_t i = 0; i < b.centers->size(); ++i) {
                     const double c = b.centers->point(i)[0];
                     open.push_back({c - b.radius, c + b.radius});
                   }
                   open = std::get<Region::OpenIntervals>(Region::open_intervals(open).shape()).intervals;
                 },
                 [&](const auto&) {
                   throw Error(ErrorKind::DimensionMismatch, "region is not one-dimensional");
                 },
             },
             u.shape());
  std::vector<Interval> gaps;
  double cursor = lo;
  for (const auto& o : open) {
    if (o.hi <= cursor) continue;
    if (o.lo >= hi) break;
    if (o.lo >= cursor) gaps.push_back({cursor, o.lo});
    cursor = o.hi;
  }
  if (cursor <= hi) gaps.push_back({cursor, hi});
  return normalize(std::move(gaps));
}

Region everything(std::size_t dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Region::open_box(Box(std::vector<double>(dim, -inf), std::vector<double>(dim, inf)));
}

bool is_everything(const Region& u) {
  const auto* b = std::get_if<Region::OpenBox>(&u.shape());
  if (!b) return false;
  for (std::size_t d = 0; d < b->box.dim(); ++d) {
    if (!std::isinf(b->box.lo[d]) || !std::isinf(b->box.hi[d]) || b->box.lo[d] > 0 || b->box.hi[d] < 0) return false;
  }
  return true;
}

/// Membership with a prebuilt index of the set for ball hit tests.
bool member_indexed(const SetValue& a, const PointIndex* index, const FellNeighborhood& nb) {
  if (!index) return fell_member(a, nb);
  const auto& cloud = std::get<PointCloud>(a);
  const bool all = is_everything(nb.u);
  for (std::size_t i = 0; i < cloud.size() && !all; ++i) {
    auto p = cloud.point(i);
    if (nb.k && !nb.k->contains(p, default_tol)) continue;
    if (!nb.u.contains(p)) return false;
  }
  for (const auto& v : nb.hits) {
    if (const auto* b = std::get_if<Region::OpenBall>(&v.shape())) {
      auto d = index->nearest_distance(b->center);
      if (!d || !(*d < b->radius + default_tol)) return false;
    } else if (!hits(cloud, v)) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

Status status_from_string(std::string_view s) {
  if (s == "pass") return Status::pass;
  if (s == "fail") return Status::fail;
  if (s == "inconclusive") return Status::inconclusive;
  throw Error(ErrorKind::ParseError, "unknown status '" + std::string(s) + "'");
}

std::string_view to_string(Hypertopology kind) {
  switch (kind) {
    case Hypertopology::lower_vietoris: return "lower_vietoris";
    case Hypertopology::upper_vietoris: return "upper_vietoris";
    case Hypertopology::upper_cocompact: return "upper_cocompact";
    case Hypertopology::fell: return "fell";
  }
  return "?";
}

Hypertopology hypertopology_from_string(std::string_view s) {
  for (auto k : {Hypertopology::lower_vietoris, Hypertopology::upper_vietoris,
                 Hypertopology::upper_cocompact, Hypertopology::fell}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::ParseError, "unknown hypertopology '" + std::string(s) + "'");
}

void EstimationConfig::validate() const {
  if (n0 < 1) throw Error(ErrorKind::BadWindow, "n0 must be >= 1");
  if (n1 < n0) throw Error(ErrorKind::BadWindow, "n1 must be >= n0");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidConfig, "eps must be > 0");
  if (!(grid_pitch > 0.0)) throw Error(ErrorKind::InvalidConfig, "grid pitch must be > 0");
  if (eps < grid_pitch / 2.0 - default_tol) {
    throw Error(ErrorKind::InvalidConfig, "eps must be at least half the grid pitch");
  }
  if (window.dim() == 0 || !window.bounded()) throw Error(ErrorKind::BadWindow, "window must be a bounded box");
}

SetValue clip_to_window(const SetValue& a, const Box& window) {
  return std::visit(overloaded{
                        [&](const ClosedSet1D& s) -> SetValue {
                          return set_intersection(s, ClosedSet1D::interval(window.lo[0], window.hi[0]));
                        },
                        [&](const PointCloud& c) -> SetValue {
                          return PointCloud::truncate(c.dim(), c.coords(), window, c.resolution());
                        },
                    },
                    a);
}

PointCloud cloud_net(const PointCloud& cloud, double spacing) {
  std::vector<double> chosen;
  const std::size_t dim = cloud.dim();
  // Bucket the chosen points on a grid of side `spacing` so only the 3^dim
  // neighbouring buckets need checking.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  auto cell_of = [&](std::span<const double> p, std::size_t d) {
    return static_cast<std::int64_t>(std::floor(p[d] / spacing));
  };
  auto hash = [](std::span<const std::int64_t> c) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
    return h;
  };
  std::vector<std::int64_t> cell(dim), probe(dim);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t d = 0; d < dim; ++d) cell[d] = cell_of(p, d);
    bool covered = false;
    std::vector<int> off(dim, -1);
    while (!covered) {
      for (std::size_t d = 0; d < dim; ++d) probe[d] = cell[d] + off[d];
      if (auto it = buckets.find(hash(probe)); it != buckets.end()) {
        for (auto j : it->second) {
          double s = 0.0;
          for (std::size_t d = 0; d < dim; ++d) {
            const double diff = chosen[j * dim + d] - p[d];
            s += diff * diff;
          }
          if (s <= spacing * spacing) {
            covered = true;
            break;
          }
        }
      }
      std::size_t d = dim;
      while (d-- > 0) {
        if (++off[d] <= 1) break;
        off[d] = -1;
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    if (!covered) {
      buckets[hash(cell)].push_back(chosen.size() / dim);
      chosen.insert(chosen.end(), p.begin(), p.end());
    }
  }
  return PointCloud(dim, std::move(chosen), cloud.window(), spacing);
}

KuratowskiEstimates kuratowski_estimates(const SetSequence& seq, const EstimationConfig& cfg) {
  cfg.validate();
  if (seq.kind == SetKind::one_d && cfg.window.dim() != 1) {
    throw Error(ErrorKind::DimensionMismatch, "1-D sequence needs a 1-D window");
  }
  Grid grid(cfg.window, cfg.grid_pitch);
  Raster raster(grid);
  for (int i = cfg.n0; i <= cfg.n1; ++i) {
    raster.begin_index(i);
    std::visit([&](const auto& s) { raster.mark_set(s, cfg.eps); }, seq.at(i));
  }
  const int n = cfg.n1 - cfg.n0 + 1;
  return {materialize(grid, raster.keys_with_count(n), seq.kind, cfg),
          materialize(grid, raster.keys_with_count(1), seq.kind, cfg)};
}

SetValue ls_estimate(const SetSequence& seq, const EstimationConfig& cfg) {
  return kuratowski_estimates(seq, cfg).ls;
}

SetValue li_estimate(const SetSequence& seq, const EstimationConfig& cfg) {
  return kuratowski_estimates(seq, cfg).li;
}

Verdict kp_verdict(const SetSequence& seq, const SetValue& a_in, const EstimationConfig& cfg) {
  const auto est = kuratowski_estimates(seq, cfg);
  const SetValue a = clip_to_window(a_in, cfg.window);
  std::vector<Violation> violations;

  const DistanceTo to_a(a);
  for (auto& p : sample_points(est.ls, cfg.grid_pitch)) {
    const double d = to_a(p);
    if (d > 2.0 * cfg.eps + default_tol) violations.push_back({std::move(p), d, "cluster point outside limit"});
  }
  const DistanceTo to_li(est.li);
  for (auto& p : sample_points(a, cfg.grid_pitch)) {
    const double d = to_li(p);
    if (d > cfg.eps + default_tol) violations.push_back({std::move(p), d, "limit point not approached"});
  }
  return classify(std::move(violations), cfg);
}

std::optional<Witness> fell_violation(const SetValue& a, const FellNeighborhood& nb) {
  std::optional<Witness> out;
  std::visit(overloaded{
                 [&](const ClosedSet1D& s) {
                   const ClosedSet1D part = nb.k ? restrict_to(s, *nb.k) : s;
                   if (!contained_in(part, nb.u)) {
                     auto bad = set_intersection(part, closed_complement_within(nb.u, part.min(), part.max()));
                     double x = bad.empty() ? part.min() : bad.min();
                     out = Witness{std::nullopt, {x}, "point outside containment region"};
                   }
                 },
                 [&](const PointCloud& c) {
                   // Report the violating point deepest inside the cloud's window.
                   double best = -1.0;
                   for (std::size_t i = 0; i < c.size(); ++i) {
                     auto p = c.point(i);
                     if (nb.k && !nb.k->contains(p, default_tol)) continue;
                     if (nb.u.contains(p)) continue;
                     const double depth = c.window().depth(p);
                     if (depth > best) {
                       best = depth;
                       out = Witness{std::nullopt, {p.begin(), p.end()}, "point outside containment region"};
                     }
                   }
                 },
             },
             a);
  if (out) return out;
  for (std::size_t j = 0; j < nb.hits.size(); ++j) {
    if (!hits(a, nb.hits[j])) {
      return Witness{std::nullopt, representative_point(nb.hits[j]),
                     "misses hit set " + std::to_string(j)};
    }
  }
  return std::nullopt;
}

bool fell_member(const SetValue& a, const FellNeighborhood& nb) { return !fell_violation(a, nb); }

Verdict finally_in(const SetSequence& seq, const FellNeighborhood& nb, int n1, int first) {
  first = std::max({first, seq.first_index, 1});
  if (n1 < first) throw Error(ErrorKind::BadWindow, "horizon before first index");
  Verdict v;
  std::optional<int> final_index;
  std::optional<Witness> last_violation;
  for (int i = first; i <= n1; ++i) {
    auto w = fell_violation(seq.at(i), nb);
    if (w) {
      final_index.reset();
      w->index = i;
      last_violation = std::move(w);
    } else if (!final_index) {
      final_index = i;
    }
  }
  if (!final_index) {
    v.status = Status::fail;
    last_violation->clause = nb.label.empty() ? last_violation->clause : nb.label + ": " + last_violation->clause;
    v.witnesses.push_back(std::move(*last_violation));
    return v;
  }
  v.final_index = final_index;
  return v;
}

std::vector<FellNeighborhood> canonical_family(const SetValue& a_in, Hypertopology kind,
                                               const EstimationConfig& cfg) {
  cfg.validate();
  const SetValue a = clip_to_window(a_in, cfg.window);
  const double eps = cfg.eps;
  const std::size_t dim = cfg.window.dim();
  std::vector<FellNeighborhood> family;

  auto add_lower = [&] {
    for (auto& c : sample_points(a, eps)) {
      family.push_back({everything(dim), std::nullopt, {Region::ball(c, eps)}, "hit ball"});
    }
  };
  auto add_lower_cloud = [&](const PointCloud& cloud) {
    const PointCloud net = cloud_net(cloud, eps);
    for (std::size_t i = 0; i < net.size(); ++i) {
      auto p = net.point(i);
      family.push_back({everything(dim), std::nullopt,
                        {Region::ball(std::vector<double>(p.begin(), p.end()), eps)}, "hit ball"});
    }
  };
  auto add_upper_vietoris = [&] {
    std::visit(overloaded{
                   [&](const ClosedSet1D& s) {
                     family.push_back({Region::open_dilation(s, eps), std::nullopt, {}, "contained in eps-dilation"});
                   },
                   [&](const PointCloud& c) {
                     family.push_back({Region::ball_union(c, eps), std::nullopt, {}, "contained in eps-dilation"});
                   },
               },
               a);
  };
  auto add_upper_cocompact = [&] {
    std::visit(overloaded{
                   [&](const ClosedSet1D& s) {
                     const Region dil = s.empty() ? Region::open_intervals({}) : Region::open_dilation(s, eps);
                     auto k = closed_complement_within(dil, cfg.window.lo[0], cfg.window.hi[0]);
                     family.push_back({Region::open_intervals({}), CompactSet::intervals(std::move(k)), {},
                                       "misses window outside eps-dilation"});
                   },
                   [&](const PointCloud& c) {
                     family.push_back({Region::ball_union(PointCloud(dim, cfg.window, cfg.grid_pitch), eps),
                                       CompactSet::box_minus_balls(cfg.window, c, eps), {},
                                       "misses window outside eps-dilation"});
                   },
               },
               a);
  };

  const bool lower = kind == Hypertopology::lower_vietoris || kind == Hypertopology::fell;
  if (kind == Hypertopology::upper_vietoris) add_upper_vietoris();
  if (kind == Hypertopology::upper_cocompact || kind == Hypertopology::fell) add_upper_cocompact();
  if (lower) {
    if (const auto* c = std::get_if<PointCloud>(&a)) {
      add_lower_cloud(*c);
    } else {
      add_lower();
    }
  }
  return family;
}

Verdict hypertopology_verdict(const SetSequence& seq, const SetValue& a, Hypertopology kind,
                              const EstimationConfig& cfg) {
  const auto family = canonical_family(a, kind, cfg);
  const int first = std::max(seq.first_index, 1);
  if (cfg.n0 < first) throw Error(ErrorKind::BadWindow, "tail window starts before the first index");
  std::vector<SetValue> sets;
  std::vector<std::optional<PointIndex>> indexes;
  for (int i = first; i <= cfg.n1; ++i) {
    sets.push_back(seq.at(i));
    if (const auto* c = std::get_if<PointCloud>(&sets.back())) {
      indexes.emplace_back(std::in_place, *c);
    } else {
      indexes.emplace_back();
    }
  }
  Verdict v;
  int worst_final = first;
  auto slot = [&](int i) { return static_cast<std::size_t>(i - first); };
  std::vector<Violation> violations;
  std::vector<Witness> failed;
  for (const auto& nb : family) {
    int final_index = cfg.n1 + 1;
    for (int i = cfg.n1; i >= first; --i) {
      const auto& idx = indexes[slot(i)];
      if (!member_indexed(sets[slot(i)], idx ? &*idx : nullptr, nb)) break;
      final_index = i;
    }
    if (final_index <= cfg.n0) {
      worst_final = std::max(worst_final, final_index);
      continue;
    }
    // Report the last failing index inside the tail window.
    const int bad = final_index - 1;
    auto w = fell_violation(sets[slot(bad)], nb);
    Witness wit{bad, w ? w->point : std::vector<double>{}, nb.label + (w ? ": " + w->clause : "")};
    failed.push_back(std::move(wit));
  }
  if (failed.empty()) {
    v.final_index = worst_final;
    return v;
  }
  // Boundary contamination: only when every witness point sits within eps of
  // the window boundary (points outside the window count as interior).
  const bool all_boundary = std::all_of(failed.begin(), failed.end(), [&](const Witness& w) {
    return !w.point.empty() && w.point.size() == cfg.window.dim() && cfg.window.contains(w.point) &&
           cfg.window.depth(w.point) <= cfg.eps;
  });
  v.status = all_boundary ? Status::inconclusive : Status::fail;
  if (failed.size() > max_witnesses) failed.resize(max_witnesses);
  v.witnesses = std::move(failed);
  return v;
}

}  // namespace fellscope
