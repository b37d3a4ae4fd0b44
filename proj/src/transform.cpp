#include "fellscope/transform.hpp"

#include <cmath>

namespace fellscope {

ShiftedCube::ShiftedCube(double a, double b) : a_(std::min(a, b)), len_(std::abs(b - a)) {
  if (!(len_ > 0.0) || !std::isfinite(len_)) throw Error(ErrorKind::BadWindow, "time map needs a bounded interval");
}

double ShiftedCube::operator()(double t) const {
  const double u = 1.0 + (t - a_) / len_;
  return a_ + len_ * (u * u * u - 1.0) / 7.0;
}

double ShiftedCube::inverse(double s) const { return a_ + len_ * (std::cbrt(1.0 + 7.0 * (s - a_) / len_) - 1.0); }

double squash(double y) { return 2.0 * std::atan(y); }
double unsquash(double s) { return std::tan(s / 2.0); }

std::vector<double> GraphHomeomorphism::forward(std::span<const double> p) const {
  std::vector<double> q(p.begin(), p.end());
  for (std::size_t d = 0; d < q.size(); ++d) q[d] = (d == 0 && time_axis) ? time(q[d]) : squash(q[d]);
  return q;
}

std::vector<double> GraphHomeomorphism::backward(std::span<const double> p) const {
  std::vector<double> q(p.begin(), p.end());
  for (std::size_t d = 0; d < q.size(); ++d) q[d] = (d == 0 && time_axis) ? time.inverse(q[d]) : unsquash(q[d]);
  return q;
}

ClosedSet1D map_set(const ClosedSet1D& s, const ShiftedCube& phi) {
  std::vector<Interval> out;
  for (const auto& iv : s.intervals()) out.push_back({phi(iv.lo), phi(iv.hi)});
  return normalize(std::move(out));
}

Box map_window(const Box& window, const GraphHomeomorphism& h) {
  return Box(h.forward(window.lo), h.forward(window.hi));
}

PointCloud map_cloud(const PointCloud& c, const GraphHomeomorphism& h) {
  std::vector<double> coords;
  coords.reserve(c.coords().size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto q = h.forward(c.point(i));
    coords.insert(coords.end(), q.begin(), q.end());
  }
  return PointCloud(c.dim(), std::move(coords), map_window(c.window(), h), c.resolution());
}

SetValue map_value(const SetValue& s, const GraphHomeomorphism& h) {
  if (const auto* one = std::get_if<ClosedSet1D>(&s)) return map_set(*one, h.time);
  return map_cloud(std::get<PointCloud>(s), h);
}

SetSequence map_sequence(const SetSequence& seq, const GraphHomeomorphism& h) {
  SetSequence out = seq;
  out.description = "mapped " + seq.description;
  out.generator = [seq, h](int i) { return map_value(seq.at(i), h); };
  return out;
}

MeshFunction map_mesh(const MeshFunction& m, const GraphHomeomorphism& h) {
  std::vector<double> nodes;
  std::vector<double> values;
  for (std::size_t k = 0; k < m.size(); ++k) {
    nodes.push_back(h.time(m.node(k)));
    for (double v : m.value(k)) values.push_back(squash(v));
  }
  MeshFunction out(m.dim(), std::move(nodes), std::move(values));
  out.truncation = m.truncation;
  return out;
}

MeshFamily map_family(const MeshFamily& fam, const GraphHomeomorphism& h) {
  MeshFamily out = fam;
  out.description = "mapped " + fam.description;
  out.generator = [fam, h](int i) { return map_mesh(fam.at(i), h); };
  return out;
}

LimitCandidate map_candidate(const LimitCandidate& cand, const GraphHomeomorphism& h) {
  LimitCandidate out = cand;
  out.description = "mapped " + cand.description;
  out.domain = map_set(cand.domain, h.time);
  out.eval = [cand, h](double s) {
    auto v = cand.eval(h.time.inverse(s));
    for (auto& y : v) y = squash(y);
    return v;
  };
  return out;
}

}  // namespace fellscope
