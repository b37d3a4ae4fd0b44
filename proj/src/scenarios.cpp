#include "fellscope/scenarios.hpp"

#include <cmath>
#include <cstdlib>

#include "fellscope/finite_top.hpp"
#include "fellscope/integrators.hpp"
#include "fellscope/partial_maps.hpp"
#include "fellscope/transform.hpp"

namespace fellscope {

namespace {

ScenarioReport make_report(std::string name, std::string description) {
  ScenarioReport r;
  r.name = std::move(name);
  r.description = std::move(description);
  return r;
}

Status status_of(bool ok) { return ok ? Status::pass : Status::fail; }

void add(ScenarioReport& r, std::string key, Status s, Status expected, Json details = Json::object()) {
  r.verdicts.push_back({std::move(key), s, expected, std::move(details)});
}

void add(ScenarioReport& r, std::string key, const Verdict& v, Status expected) {
  add(r, std::move(key), v.status, expected, to_json(v));
}

void add(ScenarioReport& r, std::string key, const ConvergenceReport& rep, Status expected) {
  add(r, std::move(key), rep.verdict.status, expected, to_json(rep));
}

/// Turns scenario defaults into the effective configuration.
class Context {
 public:
  Context(std::string name, const ScenarioOptions& opt) : name_(std::move(name)), opt_(opt) {}

  EstimationConfig sequence_config(EstimationConfig c) const {
    c = common(c);
    if (opt_.refined) c.n1 *= 2;
    return c;
  }

  /// Step-indexed families: index i means h = h0 2^-i, so doubling the
  /// number of refinements is one more index.
  EstimationConfig mesh_config(EstimationConfig c) const {
    c = common(c);
    if (opt_.refined) c.n1 += 1;
    return c;
  }

  ClassicalConfig classical_config(ClassicalConfig c) const {
    if (opt_.horizon) c.last = *opt_.horizon;
    if (opt_.refined) {
      c.last += 1;
      c.eps /= 2.0;
    }
    return c;
  }

  std::uint64_t seed() const { return opt_.seed ? *opt_.seed : scenario_seed(name_); }
  bool transformed() const { return opt_.transformed; }

 private:
  EstimationConfig common(EstimationConfig c) const {
    if (opt_.config) c = apply_config(c, *opt_.config);
    if (opt_.eps) {
      const double ratio = c.grid_pitch / c.eps;
      c.eps = *opt_.eps;
      c.grid_pitch = *opt_.eps * ratio;
    }
    if (opt_.horizon) c.n1 = *opt_.horizon;
    if (opt_.refined) {
      c.eps /= 2.0;
      c.grid_pitch /= 2.0;
    }
    c.validate();
    return c;
  }

  std::string name_;
  const ScenarioOptions& opt_;
};

/// Identity, or the graph homeomorphism rescaled to a window.
class Mapper {
 public:
  Mapper(bool on, const Box& window) {
    if (on) h_ = GraphHomeomorphism{ShiftedCube(window.lo[0], window.hi[0]), true};
  }

  bool active() const { return h_.has_value(); }
  const GraphHomeomorphism& map() const { return *h_; }

  Box window(const Box& w) const { return h_ ? map_window(w, *h_) : w; }
  EstimationConfig config(EstimationConfig c) const {
    c.window = window(c.window);
    return c;
  }
  double time(double t) const { return h_ ? h_->time(t) : t; }
  ClosedSet1D time_set(const ClosedSet1D& s) const { return h_ ? map_set(s, h_->time) : s; }
  std::vector<double> point(const std::vector<double>& p) const { return h_ ? h_->forward(p) : p; }
  SetValue set(const SetValue& s) const { return h_ ? map_value(s, *h_) : s; }
  SetSequence sequence(const SetSequence& s) const { return h_ ? map_sequence(s, *h_) : s; }
  MeshFamily family(const MeshFamily& f) const { return h_ ? map_family(f, *h_) : f; }
  LimitCandidate candidate(const LimitCandidate& c) const { return h_ ? map_candidate(c, *h_) : c; }

 private:
  std::optional<GraphHomeomorphism> h_;
};

PointCloud cloud_of(std::size_t dim, const std::vector<std::vector<double>>& pts, const Box& window, double res) {
  std::vector<double> coords;
  for (const auto& p : pts) coords.insert(coords.end(), p.begin(), p.end());
  return PointCloud::truncate(dim, coords, window, res);
}

/// Points along the segment [a, b] at most `spacing` apart.
void push_segment(std::vector<std::vector<double>>& out, const std::vector<double>& a, const std::vector<double>& b,
                  double spacing) {
  double len = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) len += (b[d] - a[d]) * (b[d] - a[d]);
  const auto n = static_cast<std::size_t>(std::ceil(std::sqrt(len) / spacing));
  for (std::size_t k = 0; k <= n; ++k) {
    const double u = n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
    std::vector<double> p(a.size());
    for (std::size_t d = 0; d < a.size(); ++d) p[d] = a[d] + u * (b[d] - a[d]);
    out.push_back(std::move(p));
  }
}

double symmetric_excess(const SetValue& a, const SetValue& b) {
  if (is_empty(a) || is_empty(b)) return is_empty(a) && is_empty(b) ? 0.0 : std::numeric_limits<double>::infinity();
  return std::max(excess(a, b), excess(b, a));
}

Plot cloud_plot(const PointCloud& c, const std::string& title) { return set_plot(c, title); }

// ---------------------------------------------------------------------------

ScenarioReport alternating_interval(const ScenarioOptions& opt) {
  auto r = make_report("alternating_interval", "A_i = (-1)^i [0, 1]: odd and even subsequences have different limits");
  Context ctx(r.name, opt);
  EstimationConfig cfg = ctx.sequence_config({0.02, 50, 200, 0.01, Box::interval(-2.0, 2.0)});
  Mapper m(ctx.transformed(), cfg.window);
  cfg = m.config(cfg);

  const auto pos = ClosedSet1D::interval(0.0, 1.0);
  const auto neg = ClosedSet1D::interval(-1.0, 0.0);
  SetSequence seq{SetKind::one_d, [=](int i) -> SetValue { return i % 2 == 0 ? pos : neg; }, "(-1)^i [0, 1]"};
  SetSequence evens{SetKind::one_d, [=](int) -> SetValue { return pos; }, "A_{2i}"};
  SetSequence odds{SetKind::one_d, [=](int) -> SetValue { return neg; }, "A_{2i+1}"};
  seq = m.sequence(seq);
  evens = m.sequence(evens);
  odds = m.sequence(odds);
  const SetValue zero = m.set(ClosedSet1D::point(0.0));
  const SetValue whole = m.set(ClosedSet1D::interval(-1.0, 1.0));

  const auto est = kuratowski_estimates(seq, cfg);
  r.details["config"] = to_json(cfg);
  r.details["li_estimate"] = to_json(est.li);
  r.details["ls_estimate"] = to_json(est.ls);

  const double li_gap = symmetric_excess(est.li, zero);
  const double ls_gap = symmetric_excess(est.ls, whole);
  add(r, "li_estimate_near_{0}", status_of(li_gap <= 2.0 * cfg.eps), Status::pass, Json{{"excess", li_gap}});
  add(r, "ls_estimate_near_[-1,1]", status_of(ls_gap <= 2.0 * cfg.eps), Status::pass, Json{{"excess", ls_gap}});
  add(r, "kp_vs_{0}", kp_verdict(seq, zero, cfg), Status::fail);
  add(r, "kp_vs_[-1,1]", kp_verdict(seq, whole, cfg), Status::fail);
  add(r, "kp_even_subsequence_vs_[0,1]", kp_verdict(evens, m.set(pos), cfg), Status::pass);
  add(r, "kp_odd_subsequence_vs_[-1,0]", kp_verdict(odds, m.set(neg), cfg), Status::pass);
  add(r, "fell_vs_{0}", hypertopology_verdict(seq, zero, Hypertopology::fell, cfg), Status::fail);
  add(r, "lower_vietoris_vs_{0}", hypertopology_verdict(seq, zero, Hypertopology::lower_vietoris, cfg),
      Status::pass);
  add(r, "upper_cocompact_vs_[-1,1]", hypertopology_verdict(seq, whole, Hypertopology::upper_cocompact, cfg),
      Status::pass);

  Plot p{"Kuratowski estimates", "x", "", false, {}};
  p.series.push_back({"ls", false, {}});
  p.series.push_back({"li", false, {}});
  for (double x : sample_net(std::get<ClosedSet1D>(est.ls), cfg.grid_pitch)) p.series[0].points.push_back({x, 1.0});
  for (double x : sample_net(std::get<ClosedSet1D>(est.li), cfg.grid_pitch)) p.series[1].points.push_back({x, 0.0});
  r.plot = std::move(p);
  return r;
}

// ---------------------------------------------------------------------------

MeshFamily g_family() {
  MeshFamily fam;
  fam.description = "g_i on (-1)^{i+1} [0, 1], g_i(t) = (-1)^{i+1} t";
  fam.generator = [](int i) {
    const double h = std::ldexp(1.0, -8);
    const double sign = i % 2 != 0 ? 1.0 : -1.0;
    std::vector<double> nodes;
    for (int k = 0; k <= 256; ++k) nodes.push_back(sign > 0 ? k * h : -1.0 + k * h);
    return MeshFunction::sample(1, nodes, [sign](double t) { return std::vector<double>{sign * t}; }, h);
  };
  return fam;
}

LimitCandidate point_candidate(double value) {
  return {ClosedSet1D::point(0.0), [value](double) { return std::vector<double>{value}; }, 1,
          "domain {0}, value " + format_number(value)};
}

LimitCandidate t_sin_candidate() {
  return {ClosedSet1D::interval(-1.0, 1.0),
          [](double t) { return std::vector<double>{t * std::sin(1.0 / std::max(std::abs(t), 1e-12))}; }, 1,
          "t sin(1/t) on [-1, 1]"};
}

ScenarioReport g_family_ladder(const ScenarioOptions& opt) {
  auto r = make_report("g_family_ladder", "naive, restricted and Fell criteria on g_i = (-1)^{i+1} t over (-1)^{i+1}[0,1]");
  Context ctx(r.name, opt);
  EstimationConfig cfg = ctx.sequence_config({0.02, 20, 60, 0.01, Box({-1.5, -1.5}, {1.5, 1.5})});
  Mapper m(ctx.transformed(), cfg.window);
  const Box window = cfg.window;
  cfg = m.config(cfg);
  const auto fam = m.family(g_family());
  const auto seed = ctx.seed();

  auto naive = naive_evaluation_test(fam, m.candidate(t_sin_candidate()), cfg);
  add(r, "naive_vs_t_sin_on_[-1,1]", naive, Status::pass);
  r.details["naive_vacuous_points"] = naive.vacuous_points;
  r.details["naive_approached_points"] = naive.approached_points;
  add(r, "naive_vs_{0}_value_1", naive_evaluation_test(fam, m.candidate(point_candidate(1.0)), cfg), Status::fail);
  add(r, "restricted_vs_t_sin_on_[-1,1]", restricted_test(fam, m.candidate(t_sin_candidate()), cfg, seed),
      Status::fail);
  add(r, "restricted_vs_{0}_value_0", restricted_test(fam, m.candidate(point_candidate(0.0)), cfg, seed),
      Status::pass);
  add(r, "restricted_vs_{0}_value_0.5", restricted_test(fam, m.candidate(point_candidate(0.5)), cfg, seed),
      Status::fail);
  add(r, "fell_vs_{0}_value_0", fell_test(fam, m.candidate(point_candidate(0.0)), cfg), Status::fail);

  const auto graphs = graph_sequence(fam, cfg.window, cfg.grid_pitch / 2.0);
  const SetValue origin = cloud_of(2, {m.point({0.0, 0.0})}, cfg.window, cfg.grid_pitch);
  add(r, "kp_graphs_vs_{(0,0)}", kp_verdict(graphs, origin, cfg), Status::fail);

  std::vector<std::vector<double>> wedge;
  push_segment(wedge, {-1.0, 1.0}, {0.0, 0.0}, cfg.grid_pitch / 4.0);
  push_segment(wedge, {0.0, 0.0}, {1.0, 1.0}, cfg.grid_pitch / 4.0);
  for (auto& p : wedge) p = m.point(p);
  const SetValue wedge_cloud = cloud_of(2, wedge, cfg.window, cfg.grid_pitch / 4.0);

  const auto scan = graph_limit_scan(fam, cfg);
  const double gap = symmetric_excess(scan.estimate, wedge_cloud);
  add(r, "graph_limit_is_graph", status_of(scan.is_graph), Status::pass,
      Json{{"column", scan.column ? Json(*scan.column) : Json(nullptr)}});
  add(r, "ls_estimate_near_wedge", status_of(gap <= 2.0 * cfg.eps), Status::pass, Json{{"excess", gap}});
  (void)window;
  r.plot = cloud_plot(scan.estimate, "cluster points of the graphs");
  return r;
}

// ---------------------------------------------------------------------------

ScenarioReport tanh_graph_limit(const ScenarioOptions& opt) {
  auto r = make_report("tanh_graph_limit", "graphs of tanh(i x) on [-1, 1] cluster on a set that is not a graph");
  Context ctx(r.name, opt);
  EstimationConfig cfg = ctx.sequence_config({0.02, 200, 400, 0.01, Box({-1.5, -1.5}, {1.5, 1.5})});
  Mapper m(ctx.transformed(), cfg.window);
  cfg = m.config(cfg);

  MeshFamily base;
  base.description = "tanh(i x) on [-1, 1], h = 2^-9";
  base.generator = [](int i) {
    const double h = std::ldexp(1.0, -9);
    std::vector<double> nodes;
    for (int k = 0; k <= 1024; ++k) nodes.push_back(-1.0 + k * h);
    return MeshFunction::sample(1, nodes, [i](double t) { return std::vector<double>{std::tanh(i * t)}; }, h);
  };
  const auto fam = m.family(base);
  auto sign = [](double t) { return std::vector<double>{t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)}; };
  const LimitCandidate split{normalize({{-1.0, -0.1}, {0.1, 1.0}}), sign, 1, "sign off (-0.1, 0.1)"};
  const LimitCandidate full{ClosedSet1D::interval(-1.0, 1.0), sign, 1, "sign on [-1, 1]"};

  const auto scan = graph_limit_scan(fam, cfg);
  add(r, "graph_limit_is_graph", status_of(scan.is_graph), Status::fail,
      Json{{"column", scan.column ? Json(*scan.column) : Json(nullptr)}});
  const PointIndex idx(scan.estimate);
  for (auto probe : {std::vector<double>{0.5, 1.0}, std::vector<double>{-0.5, -1.0}}) {
    const auto q = m.point(probe);
    const double d = idx.nearest_distance(q).value_or(std::numeric_limits<double>::infinity());
    add(r, "estimate_contains_(" + format_number(probe[0]) + "," + format_number(probe[1]) + ")",
        status_of(d <= cfg.eps), Status::pass, Json{{"distance", d}});
  }
  add(r, "compact_open_K=[0.5,1]_vs_sign_off_0",
      compact_open_test(fam, m.candidate(split), {m.time_set(ClosedSet1D::interval(0.5, 1.0))}, cfg), Status::pass);
  add(r, "compact_open_K=[-1,1]_vs_sign",
      compact_open_test(fam, m.candidate(full), {m.time_set(ClosedSet1D::interval(-1.0, 1.0))}, cfg), Status::fail);
  add(r, "fell_vs_sign_off_0", fell_test(fam, m.candidate(split), cfg), Status::fail);

  // The computed limit includes the vertical segment over 0; the union of
  // the two rays alone misses it.
  std::vector<std::vector<double>> rays, segment;
  const double s = cfg.grid_pitch / 4.0;
  push_segment(rays, {-1.0, -1.0}, {0.0, -1.0}, s);
  push_segment(rays, {0.0, 1.0}, {1.0, 1.0}, s);
  push_segment(segment, {0.0, -1.0}, {0.0, 1.0}, s);
  auto limit = rays;
  limit.insert(limit.end(), segment.begin(), segment.end());
  for (auto* v : {&rays, &limit}) {
    for (auto& p : *v) p = m.point(p);
  }
  const auto graphs = graph_sequence(fam, cfg.window, cfg.grid_pitch / 2.0);
  add(r, "kp_graphs_vs_rays_and_segment", kp_verdict(graphs, cloud_of(2, limit, cfg.window, s), cfg), Status::pass);
  add(r, "kp_graphs_vs_rays_only", kp_verdict(graphs, cloud_of(2, rays, cfg.window, s), cfg), Status::fail);
  r.plot = cloud_plot(scan.estimate, "cluster points of tanh(i x)");
  return r;
}

// ---------------------------------------------------------------------------

ScenarioReport escaping_point(const ScenarioOptions& opt) {
  auto r = make_report("escaping_point", "A_i = {i}: co-compact convergence to the empty set without Vietoris convergence");
  Context ctx(r.name, opt);
  EstimationConfig cfg = ctx.sequence_config({0.02, 50, 200, 0.01, Box::interval(-10.0, 10.0)});
  Mapper m(ctx.transformed(), cfg.window);
  cfg = m.config(cfg);
  const auto seq = m.sequence({SetKind::one_d, [](int i) -> SetValue { return ClosedSet1D::point(i); }, "{i}"});
  const SetValue none = ClosedSet1D();

  add(r, "upper_cocompact_vs_empty", hypertopology_verdict(seq, none, Hypertopology::upper_cocompact, cfg),
      Status::pass);
  add(r, "upper_vietoris_vs_empty", hypertopology_verdict(seq, none, Hypertopology::upper_vietoris, cfg),
      Status::fail);
  add(r, "lower_vietoris_vs_empty", hypertopology_verdict(seq, none, Hypertopology::lower_vietoris, cfg),
      Status::pass);
  add(r, "fell_vs_empty", hypertopology_verdict(seq, none, Hypertopology::fell, cfg), Status::pass);
  add(r, "kp_vs_empty", kp_verdict(seq, none, cfg), Status::pass);

  FellNeighborhood misses{Region::open_intervals({}), CompactSet::intervals(m.time_set(ClosedSet1D::interval(-5, 5))),
                          {}, "misses [-5, 5]"};
  auto v = finally_in(seq, misses, cfg.n1);
  add(r, "finally_misses_[-5,5]", status_of(v.passed() && v.final_index && *v.final_index <= cfg.n0), Status::pass,
      to_json(v));
  const auto inside = m.time_set(ClosedSet1D::interval(-5, 5));
  FellNeighborhood contained{Region::open_intervals({{inside.min(), inside.max()}}), std::nullopt, {},
                             "contained in (-5, 5)"};
  add(r, "finally_contained_in_(-5,5)", finally_in(seq, contained, cfg.n1), Status::fail);
  return r;
}

// ---------------------------------------------------------------------------

ScenarioReport funnel_windowed(const ScenarioOptions& opt) {
  auto r = make_report("funnel_windowed", "A_n = R x {1/n}: windowed Fell convergence to the x-axis, but no fixed index puts A_n inside "
                   "the funnel |x y| < 1 on every window");
  Context ctx(r.name, opt);
  bool uniform = true;
  Json finals = Json::array();
  for (double w : {4.0, 16.0, 64.0}) {
    EstimationConfig cfg = ctx.sequence_config({0.1, 25, 50, 0.05, Box({-w, -1.5}, {w, 1.5})});
    const Box window = cfg.window;
    Mapper m(ctx.transformed(), cfg.window);
    cfg = m.config(cfg);
    const double spacing = cfg.grid_pitch / 2.0;
    auto line = [w, window, spacing](double y) {
      std::vector<std::vector<double>> pts;
      push_segment(pts, {-w, y}, {w, y}, spacing);
      return cloud_of(2, pts, window, spacing);
    };
    SetSequence base{SetKind::cloud, [line](int n) -> SetValue { return line(1.0 / n); }, "R x {1/n}"};
    const auto seq = m.sequence(base);
    const SetValue axis = m.set(line(0.0));
    const std::string tag = "_W=" + format_number(w);
    add(r, "kp_vs_x_axis" + tag, kp_verdict(seq, axis, cfg), Status::pass);
    add(r, "fell_vs_x_axis" + tag, hypertopology_verdict(seq, axis, Hypertopology::fell, cfg), Status::pass);

    // The funnel is tested in the original coordinates: mapped points are
    // pulled back, which is membership in the image of the funnel.
    SetSequence pulled = seq;
    if (m.active()) {
      pulled.generator = [seq, m, window](int n) -> SetValue {
        const auto c = std::get<PointCloud>(seq.at(n));
        std::vector<double> coords;
        for (std::size_t i = 0; i < c.size(); ++i) {
          auto p = m.map().backward(c.point(i));
          coords.insert(coords.end(), p.begin(), p.end());
        }
        return PointCloud::truncate(2, coords, window, c.resolution());
      };
    }
    FellNeighborhood funnel{Region::funnel(1.0), std::nullopt, {}, "inside |x y| < 1"};
    const auto v = finally_in(pulled, funnel, cfg.n1);
    const bool ok = v.passed() && v.final_index && *v.final_index <= cfg.n0;
    uniform = uniform && ok;
    finals.push_back(v.final_index ? Json(*v.final_index) : Json(nullptr));
    add(r, "upper_vietoris_funnel" + tag, status_of(ok), w < 20.0 ? Status::pass : Status::fail, to_json(v));
  }
  r.details["funnel_final_indices"] = finals;
  add(r, "upper_vietoris_funnel_uniform_over_windows", status_of(uniform), Status::fail,
      Json{{"final_indices", finals}});
  return r;
}

// ---------------------------------------------------------------------------

MeshFamily exact_sampler(const LimitCandidate& exact, double h0, double t_end, std::size_t dim) {
  MeshFamily fam;
  fam.description = "exact solution sampled on h0 2^-i";
  fam.parameter = [h0](int i) { return std::ldexp(h0, -i); };
  fam.generator = [exact, h0, t_end, dim](int i) {
    const double h = std::ldexp(h0, -i);
    std::vector<double> nodes;
    const auto steps = static_cast<long>(std::floor(t_end / h + 1e-9));
    for (long k = 0; k <= steps; ++k) nodes.push_back(static_cast<double>(k) * h);
    return MeshFunction::sample(dim, nodes, exact.eval, h);
  };
  return fam;
}

double max_energy_drift(const MeshFunction& mesh) {
  double worst = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const auto v = mesh.value(k);
    worst = std::max(worst, std::abs(v[0] * v[0] + v[1] * v[1] - 1.0));
  }
  return worst;
}

ScenarioReport euler_exp(const ScenarioOptions& opt) {
  auto r = make_report("euler_exp", "explicit Euler for y' = y, y(0) = 1 on [0, 1], h = 2^-i");
  Context ctx(r.name, opt);
  const auto problem = exp_problem();
  EstimationConfig cfg = ctx.mesh_config({0.05, 7, 10, 0.025, Box({0.0, 0.0}, {1.0, 3.0})});
  Mapper m(ctx.transformed(), cfg.window);
  cfg = m.config(cfg);
  const auto fam = m.family(refinement_family(problem, Method::euler(), 1.0, 1.0));
  const auto exact = m.candidate(LimitCandidate{ClosedSet1D::interval(0.0, 1.0), problem.exact->eval, 1, "e^t"});
  const double t_star = m.time(1.0);

  const auto classical = classical_test(fam, exact, t_star, ctx.classical_config({3, 10, 1e-2}));
  add(r, "classical", classical, Status::pass);
  const double order = classical.order.value_or(0.0);
  add(r, "order_near_1", status_of(std::abs(order - 1.0) <= 0.1), Status::pass, Json{{"order", order}});
  const auto sampler = m.family(exact_sampler(exp_problem().exact.value(), 1.0, 1.0, 1));
  const auto zero = classical_test(sampler, exact, t_star, ctx.classical_config({3, 10, 1e-2}));
  double worst = 0.0;
  for (const auto& row : zero.error_table) worst = std::max(worst, row.error);
  add(r, "exact_sampler_zero_error", status_of(worst <= 1e-12), Status::pass, Json{{"max_error", worst}});

  add(r, "naive", naive_evaluation_test(fam, exact, cfg), Status::pass);
  add(r, "restricted", restricted_test(fam, exact, cfg, ctx.seed()), Status::pass);
  add(r, "fell", fell_test(fam, exact, cfg), Status::pass);
  add(r, "compact_open_K=[0,1]", compact_open_test(fam, exact, {m.time_set(ClosedSet1D::interval(0, 1))}, cfg),
      Status::pass);
  const auto graphs = graph_sequence(fam, cfg.window, cfg.grid_pitch / 2.0);
  add(r, "kp_graphs_vs_exact_graph", kp_verdict(graphs, candidate_graph(exact, cfg.window, cfg.grid_pitch / 2.0), cfg),
      Status::pass);
  r.table = error_table(classical);
  r.plot = error_plot(classical);
  return r;
}

ScenarioReport rk4_oscillator(const ScenarioOptions& opt) {
  auto r = make_report("rk4_oscillator", "classical RK4 for y'' = -y on [0, 4], h = 2^-i");
  Context ctx(r.name, opt);
  const auto problem = oscillator_problem();
  EstimationConfig cfg = ctx.mesh_config({0.04, 5, 8, 0.02, Box({0.0, -1.5, -1.5}, {4.0, 1.5, 1.5})});
  Mapper m(ctx.transformed(), cfg.window);
  cfg = m.config(cfg);
  const auto raw = refinement_family(problem, Method::rk4(), 1.0, 4.0);
  const auto fam = m.family(raw);
  const auto exact = m.candidate(LimitCandidate{ClosedSet1D::interval(0.0, 4.0), problem.exact->eval, 2, "(cos, -sin)"});

  const auto cc = ctx.classical_config({3, 10, 1e-2});
  const auto classical = classical_test(fam, exact, m.time(4.0), cc);
  add(r, "classical", classical, Status::pass);
  const double order = classical.order.value_or(0.0);
  add(r, "order_near_4", status_of(std::abs(order - 4.0) <= 0.2), Status::pass, Json{{"order", order}});

  // Energy is a property of the untransformed solution.
  const double coarse = max_energy_drift(raw.at(cc.first));
  const double fine = max_energy_drift(raw.at(cc.last));
  add(r, "energy_drift_vanishes", status_of(fine < coarse && fine <= 1e-9), Status::pass,
      Json{{"coarse", coarse}, {"fine", fine}});

  add(r, "fell", fell_test(fam, exact, cfg), Status::pass);
  add(r, "compact_open_K=[0,4]", compact_open_test(fam, exact, {m.time_set(ClosedSet1D::interval(0, 4))}, cfg),
      Status::pass);
  r.table = error_table(classical);
  r.plot = error_plot(classical);
  return r;
}

ScenarioReport riccati_blowup(const ScenarioOptions& opt) {
  auto r = make_report("riccati_blowup", "RK4 for y' = y^2, y(0) = 1 with blow-up guard 1e6: domains shrink to [0, 1)");
  Context ctx(r.name, opt);
  const auto problem = riccati_blowup_problem();
  const auto raw = refinement_family(problem, Method::rk4(), 1.0, 2.0);
  auto inv = [](double t) { return std::vector<double>{1.0 / (1.0 - t)}; };
  const LimitCandidate exact{ClosedSet1D::interval(0.0, 0.9), inv, 1, "1/(1-t) on [0, 0.9]"};
  const LimitCandidate through{normalize({{0.0, 0.9}, {1.1, 1.5}}), inv, 1, "1/(1-t) on [0, 0.9] u [1.1, 1.5]"};

  EstimationConfig near = ctx.mesh_config({0.02, 8, 10, 0.01, Box({0.0, 0.0}, {0.9, 12.0})});
  EstimationConfig wide = ctx.mesh_config({0.02, 6, 10, 0.01, Box({0.0, -100.0}, {2.0, 100.0})});
  Mapper mn(ctx.transformed(), near.window);
  Mapper mw(ctx.transformed(), wide.window);
  near = mn.config(near);
  wide = mw.config(wide);

  add(r, "fell_vs_exact_on_[0,0.9]", fell_test(mn.family(raw), mn.candidate(exact), near), Status::pass);
  add(r, "naive_vs_exact_on_[0,0.9]", naive_evaluation_test(mn.family(raw), mn.candidate(exact), near), Status::pass);
  add(r, "compact_open_K=[0,0.9]",
      compact_open_test(mn.family(raw), mn.candidate(exact), {mn.time_set(ClosedSet1D::interval(0, 0.9))}, near),
      Status::pass);
  add(r, "fell_vs_domain_through_1.2", fell_test(mw.family(raw), mw.candidate(through), wide), Status::fail);

  const auto graphs = graph_sequence(mw.family(raw), wide.window, wide.grid_pitch / 2.0);
  const auto ls = std::get<PointCloud>(ls_estimate(graphs, wide));
  std::optional<std::vector<double>> spurious;
  const double lo = mw.time(1.05), hi = mw.time(2.0);
  for (std::size_t i = 0; i < ls.size() && !spurious; ++i) {
    if (ls.point(i)[0] >= lo && ls.point(i)[0] <= hi) spurious = std::vector<double>(ls.point(i).begin(), ls.point(i).end());
  }
  add(r, "no_cluster_beyond_t=1.05", status_of(!spurious), Status::pass,
      spurious ? Json{{"point", *spurious}} : Json::object());

  Json stops = Json::array();
  bool monotone = true;
  double prev_stop = std::numeric_limits<double>::infinity();
  for (int i = wide.n0 - 2; i <= wide.n1; ++i) {
    const auto mesh = raw.at(i);
    const double h = raw.parameter(i);
    const double stop = mesh.truncation ? mesh.truncation->t : mesh.nodes().back();
    monotone = monotone && mesh.truncation && stop <= prev_stop + h && std::abs(mesh.nodes().back() - 1.0) <= 2.0 * h;
    prev_stop = stop;
    stops.push_back(Json{{"h", h}, {"t_stop", stop}, {"last_node", mesh.nodes().back()}});
  }
  add(r, "truncation_converges_to_1", status_of(monotone), Status::pass, Json{{"truncations", stops}});
  r.details["truncations"] = stops;
  r.plot = cloud_plot(ls, "cluster points of the graphs");
  return r;
}

// ---------------------------------------------------------------------------

FiniteCriterion gamma1() { return FiniteCriterion(3, {{1, 2}, {2, 3}}); }
FiniteCriterion gamma2() { return FiniteCriterion(3, {{1, 3}, {3, 2}}); }

Json opens_text(const FiniteTopology& t) {
  Json a = Json::array();
  for (auto u : t.opens()) a.push_back(format_subset(u, t.n()));
  return a;
}

ScenarioReport finite_gamma12(const ScenarioOptions&) {
  auto r = make_report("finite_gamma12", "constant-net criteria gamma_1, gamma_2 on {1, 2, 3}");
  const auto g1 = gamma1(), g2 = gamma2();
  const std::vector<std::pair<std::string, std::string>> table{{"∅", "∅"},  {"1", "12"},  {"2", "23"},  {"3", "3"},
                                                               {"23", "23"}, {"12", "123"}, {"13", "123"}};
  bool ok = true;
  Json rows = Json::array();
  for (const auto& [in, out] : table) {
    const auto got = format_subset(pre_closure(g1, parse_subset(in, 3)), 3);
    ok = ok && got == out;
    rows.push_back(Json{{"set", in}, {"pcl", got}});
  }
  add(r, "pre_closure_table", status_of(ok), Status::pass, Json{{"rows", rows}});

  const auto t1 = generate_topology(g1), t2 = generate_topology(g2);
  add(r, "gamma1_generates_tau1", status_of(t1 == FiniteTopology(3, {0, 0b001, 0b011, 0b111})), Status::pass,
      Json{{"opens", opens_text(t1)}});
  add(r, "gamma2_generates_tau2", status_of(t2 == FiniteTopology(3, {0, 0b001, 0b101, 0b111})), Status::pass,
      Json{{"opens", opens_text(t2)}});
  const auto check = is_topological(g1);
  add(r, "gamma1_is_topological", status_of(check.topological), Status::fail,
      check.missing_arrow ? Json{{"missing_arrow", {check.missing_arrow->first, check.missing_arrow->second}}}
                          : Json::object());
  const auto join = topology_join(t1, t2);
  add(r, "join_is_union", status_of(join == FiniteTopology(3, {0, 0b001, 0b011, 0b101, 0b111})), Status::pass,
      Json{{"opens", opens_text(join)}});
  const auto meet = topology_meet(t1, t2);
  add(r, "or_generates_meet", status_of(generate_topology(criterion_or(g1, g2)) == meet), Status::pass,
      Json{{"opens", opens_text(meet)}});
  const auto conj = generate_topology(criterion_and(g1, g2));
  add(r, "and_generates_discrete", status_of(conj == FiniteTopology::discrete(3)), Status::pass,
      Json{{"opens", opens_text(conj)}});
  add(r, "and_strictly_finer_than_join", status_of(conj.finer_or_equal(join) && !(conj == join)), Status::pass);
  r.details["tau1"] = to_json(t1);
  r.details["tau2"] = to_json(t2);
  return r;
}

ScenarioReport topology_census(const ScenarioOptions&) {
  auto r = make_report("topology_census", "number of topologies on n points, n = 1..5");
  const int expect[] = {1, 4, 29, 355, 6942};
  Table t{{"n", "topologies"}, {}};
  for (int n = 1; n <= 5; ++n) {
    const auto count = enumerate_topologies(n).size();
    t.rows.push_back({static_cast<double>(n), static_cast<double>(count)});
    add(r, "count_n=" + std::to_string(n), status_of(count == static_cast<std::size_t>(expect[n - 1])), Status::pass,
        Json{{"count", count}});
  }
  r.table = std::move(t);
  return r;
}

}  // namespace

bool ScenarioReport::as_expected() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const VerdictEntry& v) { return v.as_expected(); });
}

const VerdictEntry& ScenarioReport::verdict(const std::string& key) const {
  for (const auto& v : verdicts) {
    if (v.key == key) return v;
  }
  throw Error(ErrorKind::InvalidConfig, "no verdict '" + key + "' in " + name);
}

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry{
      {"alternating_interval", "A_i = (-1)^i [0,1]", alternating_interval},
      {"g_family_ladder", "criteria ladder on g_i", g_family_ladder},
      {"tanh_graph_limit", "graph limit of tanh(i x)", tanh_graph_limit},
      {"escaping_point", "A_i = {i}", escaping_point},
      {"funnel_windowed", "R x {1/n} under window exhaustion", funnel_windowed},
      {"euler_exp", "Euler on y' = y", euler_exp},
      {"rk4_oscillator", "RK4 on the harmonic oscillator", rk4_oscillator},
      {"riccati_blowup", "RK4 on y' = y^2 with finite-time blow-up", riccati_blowup},
      {"finite_gamma12", "gamma_1 / gamma_2 on three points", finite_gamma12},
      {"topology_census", "topologies on n <= 5 points", topology_census},
  };
  return registry;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : scenario_registry()) {
    if (s.name == name) return s;
  }
  throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + name + "'");
}

std::uint64_t scenario_seed(const std::string& name) {
  if (const char* env = std::getenv("FELLSCOPE_SEED"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw Error(ErrorKind::InvalidConfig, "FELLSCOPE_SEED must be an unsigned integer");
  }
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ull;
  return h;
}

Json to_json(const ScenarioReport& r) {
  Json j;
  j["scenario"] = r.name;
  j["description"] = r.description;
  j["as_expected"] = r.as_expected();
  Json vs = Json::array();
  for (const auto& v : r.verdicts) {
    Json e;
    e["key"] = v.key;
    e["status"] = std::string(to_string(v.status));
    e["expected"] = v.expected ? Json(std::string(to_string(*v.expected))) : Json(nullptr);
    e["details"] = v.details;
    vs.push_back(std::move(e));
  }
  j["verdicts"] = std::move(vs);
  j["details"] = r.details;
  return j;
}

std::string emit_report(const ScenarioReport& r, Format f) {
  switch (f) {
    case Format::json: return dump(to_json(r));
    case Format::csv:
      if (!r.table) throw Error(ErrorKind::FormatError, r.name + " has no tabular output");
      return to_csv(*r.table);
    case Format::svg:
      if (!r.plot) throw Error(ErrorKind::FormatError, r.name + " has no plot output");
      return to_svg(*r.plot);
  }
  return {};
}

}  // namespace fellscope
