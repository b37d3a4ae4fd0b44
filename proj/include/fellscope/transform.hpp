#pragma once

#include "fellscope/closed_sets.hpp"
#include "fellscope/kuratowski.hpp"
#include "fellscope/partial_maps.hpp"

namespace fellscope {

/// Increasing homeomorphism of R fixing the ends of [a, b]:
/// t -> a + L ((1 + (t - a) / L)^3 - 1) / 7 with L = b - a. Its derivative
/// on [a, b] lies in [3/7, 12/7].
class ShiftedCube {
 public:
  ShiftedCube(double a, double b);
  double operator()(double t) const;
  double inverse(double s) const;

 private:
  double a_;
  double len_;
};

/// 2 atan(y), applied componentwise to values.
double squash(double y);
double unsquash(double s);

/// The pair of maps (time, value) applied to graphs in R x R^d. For plain
/// subsets of R^n (no time axis) `time_axis` is false and only the value map
/// acts, on every coordinate.
struct GraphHomeomorphism {
  ShiftedCube time;
  bool time_axis = true;

  std::vector<double> forward(std::span<const double> p) const;
  std::vector<double> backward(std::span<const double> p) const;
};

ClosedSet1D map_set(const ClosedSet1D& s, const ShiftedCube& phi);
Box map_window(const Box& window, const GraphHomeomorphism& h);
PointCloud map_cloud(const PointCloud& c, const GraphHomeomorphism& h);

/// 1-D sequences map through the time map, clouds through `h`.
SetSequence map_sequence(const SetSequence& seq, const GraphHomeomorphism& h);
SetValue map_value(const SetValue& s, const GraphHomeomorphism& h);

MeshFunction map_mesh(const MeshFunction& m, const GraphHomeomorphism& h);
MeshFamily map_family(const MeshFamily& fam, const GraphHomeomorphism& h);
LimitCandidate map_candidate(const LimitCandidate& cand, const GraphHomeomorphism& h);

}  // namespace fellscope
