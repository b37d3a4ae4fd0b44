#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "fellscope/error.hpp"

namespace fellscope {

/// Absolute tolerance used wherever a boundary predicate is evaluated on
/// floating-point data.
inline constexpr double default_tol = 1e-9;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

/// A closed subset of the real line stored as a finite union of disjoint closed
/// intervals. Degenerate intervals are isolated points. The representation is
/// canonical: intervals are sorted and separated by strictly positive gaps, so
/// structural equality is set equality.
class ClosedSet1D {
 public:
  ClosedSet1D() = default;

  static ClosedSet1D point(double x);
  static ClosedSet1D interval(double lo, double hi);

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool empty() const noexcept { return intervals_.empty(); }
  std::size_t size() const noexcept { return intervals_.size(); }

  /// Smallest and largest element. Throws EmptySet on the empty set.
  double min() const;
  double max() const;

  bool contains(double x, double tol = 0.0) const;

  bool operator==(const ClosedSet1D&) const = default;

 private:
  friend ClosedSet1D normalize(std::vector<Interval> raw);
  explicit ClosedSet1D(std::vector<Interval> canonical) : intervals_(std::move(canonical)) {}

  std::vector<Interval> intervals_;
};

/// Canonical form of an arbitrary interval list: endpoints are swapped when
/// reversed, then overlapping or touching intervals are merged.
ClosedSet1D normalize(std::vector<Interval> raw);

double distance_to(const ClosedSet1D& set, double x);
ClosedSet1D dilate(const ClosedSet1D& set, double eps);

ClosedSet1D set_union(const ClosedSet1D& a, const ClosedSet1D& b);
ClosedSet1D set_intersection(const ClosedSet1D& a, const ClosedSet1D& b);

/// The domain point nearest to x (ties resolve to the lower one).
double nearest_point(const ClosedSet1D& set, double x);

/// Points of the set spaced at most `spacing` apart, always including every
/// interval endpoint and isolated point.
std::vector<double> sample_net(const ClosedSet1D& set, double spacing);

/// Axis-aligned box. Used open as a region, closed as a window or compact set.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  Box() = default;
  Box(std::vector<double> lo_, std::vector<double> hi_);
  static Box interval(double lo, double hi) { return Box({lo}, {hi}); }

  std::size_t dim() const noexcept { return lo.size(); }
  bool bounded() const;
  /// Closed-box membership with the boundary fattened by tol.
  bool contains(std::span<const double> p, double tol = 0.0) const;
  /// Distance from an interior point to the nearest face (0 outside).
  double depth(std::span<const double> p) const;

  bool operator==(const Box&) const = default;
};

/// Finite sample of a closed subset of R^dim, faithful within `window` at
/// sampling pitch `resolution`. Points are stored row-major in one buffer.
class PointCloud {
 public:
  PointCloud(std::size_t dim, Box window, double resolution);
  PointCloud(std::size_t dim, std::vector<double> coords, Box window, double resolution);

  /// Builds a cloud keeping only the points inside the window; the number of
  /// dropped points is written to `dropped` when given.
  static PointCloud truncate(std::size_t dim, std::span<const double> coords, Box window,
                             double resolution, std::size_t* dropped = nullptr);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }
  const Box& window() const noexcept { return window_; }
  double resolution() const noexcept { return resolution_; }

  bool operator==(const PointCloud&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  Box window_;
  double resolution_;
};

/// Static k-d tree over a point set, for nearest-distance queries.
class PointIndex {
 public:
  PointIndex(std::size_t dim, std::span<const double> coords);
  explicit PointIndex(const PointCloud& cloud) : PointIndex(cloud.dim(), cloud.coords()) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / (dim_ == 0 ? 1 : dim_); }
  bool empty() const noexcept { return coords_.empty(); }

  /// Euclidean distance to the nearest indexed point; nullopt when empty.
  std::optional<double> nearest_distance(std::span<const double> p) const;
  /// Nearest indexed point (its coordinates); nullopt when empty.
  std::optional<std::vector<double>> nearest_point(std::span<const double> p) const;

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    int axis;  // -1 for leaves
    double split;
    std::size_t left;
    std::size_t right;
  };

  void search(std::size_t node, std::span<const double> p, double& best_sq,
              std::size_t& best) const;

  std::size_t dim_;
  std::vector<double> coords_;  // reordered copy
  std::vector<Node> nodes_;
};

/// Open subsets drawn from a small algebra of shapes whose membership tests
/// are exact. No free-form predicates.
class Region {
 public:
  /// R minus a closed 1-D set.
  struct Complement {
    ClosedSet1D removed;
  };
  struct OpenBox {
    Box box;
  };
  struct OpenBall {
    std::vector<double> center;
    double radius;
  };
  /// Finite union of open intervals, stored disjoint and sorted.
  struct OpenIntervals {
    std::vector<Interval> intervals;
  };
  /// Finite union of open balls of a common radius.
  struct BallUnion {
    std::shared_ptr<const PointCloud> centers;
    double radius;
    std::shared_ptr<const PointIndex> index;
  };
  /// {(x, y) : |x * y| < c}, an open neighbourhood of the x-axis that narrows
  /// toward infinity.
  struct Funnel {
    double c;
  };

  using Shape = std::variant<Complement, OpenBox, OpenBall, OpenIntervals, BallUnion, Funnel>;

  static Region complement_of(ClosedSet1D removed);
  static Region open_box(Box box);
  static Region ball(std::vector<double> center, double radius);
  static Region ball(double center, double radius) { return ball(std::vector<double>{center}, radius); }
  static Region open_intervals(std::vector<Interval> intervals);
  /// Open eps-dilation of a closed 1-D set.
  static Region open_dilation(const ClosedSet1D& set, double eps);
  static Region ball_union(PointCloud centers, double radius);
  static Region funnel(double c);

  const Shape& shape() const noexcept { return shape_; }
  std::string_view kind() const;
  /// Ambient dimension; nullopt for an empty ball union.
  std::optional<std::size_t> dim() const;

  /// True iff p lies within tol of the region (tol = 0: p lies in it).
  bool contains(std::span<const double> p, double tol = 0.0) const;

 private:
  explicit Region(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// Compact control sets K used by the miss / Fell predicates.
class CompactSet {
 public:
  struct Intervals {
    ClosedSet1D set;
  };
  struct ClosedBox {
    Box box;
  };
  /// A closed box with a finite union of open balls removed.
  struct BoxMinusBalls {
    Box box;
    std::shared_ptr<const PointCloud> centers;
    double radius;
    std::shared_ptr<const PointIndex> index;
  };

  using Shape = std::variant<Intervals, ClosedBox, BoxMinusBalls>;

  static CompactSet intervals(ClosedSet1D set);
  /// Throws NotCompact for an unbounded box.
  static CompactSet box(Box box);
  static CompactSet box_minus_balls(Box box, PointCloud centers, double radius);

  const Shape& shape() const noexcept { return shape_; }
  std::string_view kind() const;
  bool contains(std::span<const double> p, double tol = 0.0) const;

 private:
  explicit CompactSet(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// Either representation of a closed set; the operations below accept both.
using SetValue = std::variant<ClosedSet1D, PointCloud>;

bool is_empty(const SetValue& s);

bool hits(const ClosedSet1D& set, const Region& v, double tol = default_tol);
bool hits(const PointCloud& set, const Region& v, double tol = default_tol);
bool hits(const SetValue& set, const Region& v, double tol = default_tol);

bool contained_in(const ClosedSet1D& set, const Region& u);
bool contained_in(const PointCloud& set, const Region& u);
bool contained_in(const SetValue& set, const Region& u);

bool misses_compact(const ClosedSet1D& set, const CompactSet& k, double tol = default_tol);
bool misses_compact(const PointCloud& set, const CompactSet& k, double tol = default_tol);
bool misses_compact(const SetValue& set, const CompactSet& k, double tol = default_tol);
bool misses_compact(const ClosedSet1D& set, const ClosedSet1D& k, double tol = default_tol);
bool misses_compact(const SetValue& set, const Box& k, double tol = default_tol);

/// Intersection with a compact set, as a set of the same representation.
ClosedSet1D restrict_to(const ClosedSet1D& set, const CompactSet& k);
PointCloud restrict_to(const PointCloud& set, const CompactSet& k, double tol = default_tol);

/// One-sided Hausdorff excess: sup over a of the distance to b. Both
/// operands must be nonempty.
double excess(const ClosedSet1D& a, const ClosedSet1D& b);
double excess(const PointCloud& a, const PointCloud& b);
double excess(const SetValue& a, const SetValue& b);

/// Point of `a` realizing the excess over `b` (1-D sets return a 1-vector).
std::vector<double> excess_witness(const SetValue& a, const SetValue& b);

}  // namespace fellscope
