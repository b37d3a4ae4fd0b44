#include "fellscope/integrators.hpp"

#include <cmath>

namespace fellscope {

namespace {

// States are advanced in extended precision; only the stored values round
// to double.
using State = std::vector<long double>;

State call(const IVProblem& p, long double t, const State& y) {
  std::vector<double> yd(y.begin(), y.end());
  auto f = p.field(static_cast<double>(t), yd);
  if (f.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "field returned wrong dimension");
  return State(f.begin(), f.end());
}

State axpy(const State& y, long double a, const State& k) {
  State out(y.size());
  for (std::size_t d = 0; d < y.size(); ++d) out[d] = y[d] + a * k[d];
  return out;
}

State step(const IVProblem& p, Method m, long double t, const State& y, long double h) {
  switch (m.name) {
    case Method::Name::euler:
      return axpy(y, h, call(p, t, y));
    case Method::Name::midpoint: {
      const auto k1 = call(p, t, y);
      return axpy(y, h, call(p, t + h / 2, axpy(y, h / 2, k1)));
    }
    case Method::Name::rk4: {
      const auto k1 = call(p, t, y);
      const auto k2 = call(p, t + h / 2, axpy(y, h / 2, k1));
      const auto k3 = call(p, t + h / 2, axpy(y, h / 2, k2));
      const auto k4 = call(p, t + h, axpy(y, h, k3));
      State out(y.size());
      for (std::size_t d = 0; d < y.size(); ++d) out[d] = y[d] + h / 6 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
      return out;
    }
  }
  return y;
}

bool finite(const State& y) {
  for (auto v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

long double norm(const State& y) {
  long double s = 0;
  for (auto v : y) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Method Method::from_string(std::string_view s) {
  if (s == "euler") return euler();
  if (s == "midpoint") return midpoint();
  if (s == "rk4") return rk4();
  throw Error(ErrorKind::ParseError, "unknown method '" + std::string(s) + "'");
}

std::string_view to_string(Method::Name n) {
  switch (n) {
    case Method::Name::euler: return "euler";
    case Method::Name::midpoint: return "midpoint";
    case Method::Name::rk4: return "rk4";
  }
  return "?";
}

MeshFunction integrate(const IVProblem& p, Method m, double h, double t_end, double blowup) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidConfig, "step must be positive");
  if (!(t_end > p.t0)) throw Error(ErrorKind::InvalidConfig, "t_end must exceed t0");
  if (!(blowup > 0.0)) throw Error(ErrorKind::InvalidConfig, "blow-up threshold must be positive");
  const auto steps = static_cast<long>(std::floor((t_end - p.t0) / h + 1e-9));
  std::vector<double> nodes{p.t0};
  std::vector<double> values(p.y0);
  State y(p.y0.begin(), p.y0.end());
  std::optional<Truncation> cut;
  for (long k = 1; k <= steps; ++k) {
    const long double t = static_cast<long double>(p.t0) + static_cast<long double>(k - 1) * h;
    y = step(p, m, t, y, h);
    const double tk = p.t0 + static_cast<double>(k) * h;
    if (!finite(y)) {
      cut = Truncation{Truncation::Reason::field_blowup_at_step, static_cast<int>(k), tk};
      break;
    }
    if (norm(y) > blowup) {
      cut = Truncation{Truncation::Reason::blowup_threshold, static_cast<int>(k), tk};
      break;
    }
    nodes.push_back(tk);
    for (auto v : y) values.push_back(static_cast<double>(v));
  }
  MeshFunction out(p.dim(), std::move(nodes), std::move(values), h);
  out.truncation = cut;
  return out;
}

MeshFamily refinement_family(const IVProblem& p, Method m, double h0, double t_end, int first_index, double blowup) {
  if (!(h0 > 0.0)) throw Error(ErrorKind::InvalidConfig, "h0 must be positive");
  MeshFamily fam;
  fam.description = p.name + " / " + std::string(to_string(m.name)) + ", h = h0 2^-i";
  fam.first_index = first_index;
  fam.parameter = [h0](int i) { return std::ldexp(h0, -i); };
  fam.generator = [p, m, h0, t_end, blowup](int i) { return integrate(p, m, std::ldexp(h0, -i), t_end, blowup); };
  return fam;
}

IVProblem exp_problem() {
  IVProblem p;
  p.name = "exp";
  p.field = [](double, const std::vector<double>& y) { return y; };
  p.y0 = {1.0};
  p.exact = LimitCandidate{ClosedSet1D::interval(0.0, 50.0),
                           [](double t) { return std::vector<double>{std::exp(t)}; }, 1, "e^t"};
  return p;
}

IVProblem riccati_blowup_problem() {
  IVProblem p;
  p.name = "riccati_blowup";
  p.field = [](double, const std::vector<double>& y) { return std::vector<double>{y[0] * y[0]}; };
  p.y0 = {1.0};
  // The maximal domain is [0, 1); the candidate stops short of the pole.
  p.exact = LimitCandidate{ClosedSet1D::interval(0.0, 0.999),
                           [](double t) { return std::vector<double>{1.0 / (1.0 - t)}; }, 1, "1/(1-t)"};
  return p;
}

IVProblem oscillator_problem() {
  IVProblem p;
  p.name = "oscillator";
  p.field = [](double, const std::vector<double>& y) { return std::vector<double>{y[1], -y[0]}; };
  p.y0 = {1.0, 0.0};
  p.exact = LimitCandidate{ClosedSet1D::interval(0.0, 1e3),
                           [](double t) { return std::vector<double>{std::cos(t), -std::sin(t)}; }, 2,
                           "(cos t, -sin t)"};
  return p;
}

IVProblem problem_by_name(std::string_view name) {
  if (name == "exp") return exp_problem();
  if (name == "riccati_blowup") return riccati_blowup_problem();
  if (name == "oscillator") return oscillator_problem();
  throw Error(ErrorKind::InvalidConfig, "unknown problem '" + std::string(name) + "'");
}

double exact_residual(const IVProblem& p, double t_end, int samples) {
  if (!p.exact) throw Error(ErrorKind::InvalidConfig, "problem has no exact solution");
  const auto dom = set_intersection(p.exact->domain, ClosedSet1D::interval(p.t0, t_end));
  double worst = 0.0;
  const double dt = 1e-5;
  for (double t : sample_net(dom, (t_end - p.t0) / samples)) {
    if (!dom.contains(t - dt) || !dom.contains(t + dt)) continue;
    const auto lo = p.exact->eval(t - dt);
    const auto hi = p.exact->eval(t + dt);
    const auto f = p.field(t, p.exact->eval(t));
    for (std::size_t d = 0; d < f.size(); ++d) {
      worst = std::max(worst, std::abs((hi[d] - lo[d]) / (2 * dt) - f[d]) / std::max(1.0, std::abs(f[d])));
    }
  }
  return worst;
}

}  // namespace fellscope
