#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fellscope/closed_sets.hpp"

namespace fellscope {

namespace {
constexpr std::size_t leaf_size = 8;
}

PointIndex::PointIndex(std::size_t dim, std::span<const double> coords) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidConfig, "index dimension must be positive");
  if (coords.size() % dim_ != 0) {
    throw Error(ErrorKind::DimensionMismatch, "coordinate buffer not a multiple of dim");
  }
  const std::size_t n = coords.size() / dim_;
  if (n == 0) return;

  // Sort a permutation, then lay the coordinates out in tree order.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  struct Frame {
    std::size_t begin, end, node;
  };
  nodes_.reserve(2 * n / leaf_size + 1);
  nodes_.push_back({0, n, -1, 0.0, 0, 0});
  std::vector<Frame> stack{{0, n, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.end - f.begin <= leaf_size) continue;
    int axis = 0;
    double widest = -1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = f.begin; i < f.end; ++i) {
        const double v = coords[perm[i] * dim_ + d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = static_cast<int>(d);
      }
    }
    const std::size_t mid = f.begin + (f.end - f.begin) / 2;
    std::nth_element(perm.begin() + static_cast<std::ptrdiff_t>(f.begin),
                     perm.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm.begin() + static_cast<std::ptrdiff_t>(f.end),
                     [&](std::size_t a, std::size_t b) {
                       return coords[a * dim_ + axis] < coords[b * dim_ + axis];
                     });
    const std::size_t left = nodes_.size();
    nodes_.push_back({f.begin, mid, -1, 0.0, 0, 0});
    const std::size_t right = nodes_.size();
    nodes_.push_back({mid, f.end, -1, 0.0, 0, 0});
    Node& node = nodes_[f.node];
    node.axis = axis;
    node.split = coords[perm[mid] * dim_ + axis];
    node.left = left;
    node.right = right;
    stack.push_back({f.begin, mid, left});
    stack.push_back({mid, f.end, right});
  }
  coords_.resize(coords.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(perm[i] * dim_), dim_,
                coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
  }
}

void PointIndex::search(std::size_t node_id, std::span<const double> p, double& best_sq,
                        std::size_t& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim_; ++d) {
        const double diff = coords_[i * dim_ + d] - p[d];
        s += diff * diff;
      }
      if (s < best_sq) {
        best_sq = s;
        best = i;
      }
    }
    return;
  }
  const double delta = p[static_cast<std::size_t>(node.axis)] - node.split;
  const std::size_t near = delta < 0 ? node.left : node.right;
  const std::size_t far = delta < 0 ? node.right : node.left;
  search(near, p, best_sq, best);
  if (delta * delta < best_sq) search(far, p, best_sq, best);
}

std::optional<double> PointIndex::nearest_distance(std::span<const double> p) const {
  if (empty()) return std::nullopt;
  if (p.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "query dimension mismatch");
  double best_sq = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  search(0, p, best_sq, best);
  return std::sqrt(best_sq);
}

std::optional<std::vector<double>> PointIndex::nearest_point(std::span<const double> p) const {
  if (empty()) return std::nullopt;
  if (p.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "query dimension mismatch");
  double best_sq = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  search(0, p, best_sq, best);
  return std::vector<double>(coords_.begin() + static_cast<std::ptrdiff_t>(best * dim_),
                             coords_.begin() + static_cast<std::ptrdiff_t>((best + 1) * dim_));
}

}  // namespace fellscope
