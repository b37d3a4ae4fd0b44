#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fellscope/partial_maps.hpp"

namespace fellscope {

inline constexpr double default_blowup = 1e6;

struct IVProblem {
  std::string name;
  std::function<std::vector<double>(double, const std::vector<double>&)> field;
  std::vector<double> y0;
  double t0 = 0.0;
  std::optional<LimitCandidate> exact;

  std::size_t dim() const noexcept { return y0.size(); }
};

struct Method {
  enum class Name { euler, midpoint, rk4 };
  Name name;
  int order;

  static Method euler() { return {Name::euler, 1}; }
  static Method midpoint() { return {Name::midpoint, 2}; }
  static Method rk4() { return {Name::rk4, 4}; }
  static Method from_string(std::string_view s);
};

std::string_view to_string(Method::Name n);

/// Uniform mesh t0 + k h up to t_end. Stops before the first state whose
/// norm exceeds `blowup` or that is not finite; the mesh records why.
MeshFunction integrate(const IVProblem& p, Method m, double h, double t_end, double blowup = default_blowup);

/// Family i -> integrate(p, m, h0 * 2^-i, t_end), indexed from first_index
/// and keyed by step.
MeshFamily refinement_family(const IVProblem& p, Method m, double h0, double t_end, int first_index = 0,
                             double blowup = default_blowup);

/// y' = y, y(0) = 1.
IVProblem exp_problem();
/// y' = y^2, y(0) = 1; the solution 1/(1 - t) escapes at t = 1.
IVProblem riccati_blowup_problem();
/// y'' = -y as the system (y, v), y(0) = 1, v(0) = 0.
IVProblem oscillator_problem();

/// Problem library by name: "exp", "riccati_blowup", "oscillator".
IVProblem problem_by_name(std::string_view name);

/// Largest |F(t, y(t)) - y'(t)| / max(1, |F(t, y(t))|) over sampled points of
/// the exact solution's domain, using a centred difference for y'.
double exact_residual(const IVProblem& p, double t_end, int samples = 200);

}  // namespace fellscope
