#include "fellscope/partial_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fellscope {

namespace {

double norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

double point_segment_distance(std::span<const double> p, std::span<const double> a, std::span<const double> b) {
  double ab2 = 0.0, ap_ab = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    ab2 += (b[d] - a[d]) * (b[d] - a[d]);
    ap_ab += (p[d] - a[d]) * (b[d] - a[d]);
  }
  const double u = ab2 > 0.0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double q = a[d] + u * (b[d] - a[d]);
    s += (p[d] - q) * (p[d] - q);
  }
  return std::sqrt(s);
}

/// Parameter range [u0, u1] of a + u (b - a), u in [0, 1], inside the closed box.
std::optional<std::pair<double, double>> clip_segment(std::span<const double> a, std::span<const double> b,
                                                      const Box& box) {
  double u0 = 0.0, u1 = 1.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double delta = b[d] - a[d];
    if (delta == 0.0) {
      if (a[d] < box.lo[d] || a[d] > box.hi[d]) return std::nullopt;
      continue;
    }
    double ulo = (box.lo[d] - a[d]) / delta;
    double uhi = (box.hi[d] - a[d]) / delta;
    if (ulo > uhi) std::swap(ulo, uhi);
    u0 = std::max(u0, ulo);
    u1 = std::min(u1, uhi);
    if (u0 > u1) return std::nullopt;
  }
  return std::make_pair(u0, u1);
}

std::vector<double> graph_point(const MeshFunction& m, std::size_t k) {
  std::vector<double> p{m.node(k)};
  auto v = m.value(k);
  p.insert(p.end(), v.begin(), v.end());
  return p;
}

void check_window(const Box& window, std::size_t dim) {
  if (window.dim() != dim + 1) throw Error(ErrorKind::DimensionMismatch, "window must have dimension 1 + d");
}

ClosedSet1D domain_in_window(const LimitCandidate& cand, const Box& window) {
  return set_intersection(cand.domain, ClosedSet1D::interval(window.lo[0], window.hi[0]));
}

struct TailSample {
  MeshFunction mesh;
  double radius;
};

std::vector<TailSample> tail_meshes(const MeshFamily& fam, const EstimationConfig& cfg) {
  std::vector<TailSample> out;
  for (int i = cfg.n0; i <= cfg.n1; ++i) {
    auto m = fam.at(i);
    const double r = std::min(cfg.eps, std::max(m.max_gap(), default_tol));
    out.push_back({std::move(m), r});
  }
  return out;
}

/// Nearest-node selections of every tail member toward every sampled t.
struct Selection {
  bool has_node = false;
  double distance = std::numeric_limits<double>::infinity();
  double node = 0.0;
  double value_error = 0.0;
};

std::vector<std::vector<Selection>> select_nodes(const std::vector<TailSample>& tail, const std::vector<double>& ts,
                                                 const LimitCandidate& cand) {
  std::vector<std::vector<Selection>> out(ts.size(), std::vector<Selection>(tail.size()));
  for (std::size_t j = 0; j < tail.size(); ++j) {
    const auto& m = tail[j].mesh;
    if (m.empty()) continue;
    for (std::size_t s = 0; s < ts.size(); ++s) {
      std::size_t k = m.nearest_node(ts[s]);
      // Prefer a neighbouring node inside the candidate domain.
      if (!cand.domain.contains(m.node(k), default_tol)) {
        for (std::size_t q : {k - 1, k + 1}) {
          if (q >= m.size() || !cand.domain.contains(m.node(q), default_tol)) continue;
          if (std::abs(m.node(q) - ts[s]) <= tail[j].radius) {
            k = q;
            break;
          }
        }
      }
      auto& sel = out[s][j];
      sel.has_node = true;
      sel.node = m.node(k);
      sel.distance = std::abs(sel.node - ts[s]);
      const auto want = cand.eval(nearest_point(cand.domain, sel.node));
      sel.value_error = norm_diff(m.value(k), want);
    }
  }
  return out;
}

struct ClauseA {
  bool passed = true;
  int approached = 0;
  std::optional<Witness> witness;
};

ClauseA evaluate_subsequence(const std::vector<std::vector<Selection>>& sel, const std::vector<TailSample>& tail,
                             const std::vector<double>& ts, const std::vector<int>& indices,
                             const EstimationConfig& cfg) {
  ClauseA out;
  for (std::size_t s = 0; s < ts.size(); ++s) {
    const bool approached = std::all_of(indices.begin(), indices.end(), [&](int i) {
      const auto j = static_cast<std::size_t>(i - cfg.n0);
      const auto& x = sel[s][j];
      return x.has_node && x.distance <= tail[j].radius;
    });
    if (!approached || indices.empty()) continue;
    ++out.approached;
    for (int i : indices) {
      const auto& x = sel[s][static_cast<std::size_t>(i - cfg.n0)];
      if (x.value_error > cfg.eps + default_tol) {
        out.passed = false;
        if (!out.witness) out.witness = Witness{i, {ts[s]}, "value mismatch along approaching nodes"};
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Truncation::Reason r) {
  switch (r) {
    case Truncation::Reason::blowup_threshold: return "blowup_threshold";
    case Truncation::Reason::field_blowup_at_step: return "FieldBlowupAtStep";
  }
  return "?";
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::naive0: return "naive0";
    case Criterion::restricted1: return "restricted1";
    case Criterion::fell2: return "fell2";
    case Criterion::classical: return "classical";
    case Criterion::compact_open: return "compact_open";
  }
  return "?";
}

MeshFunction::MeshFunction(std::size_t dim, std::vector<double> nodes, std::vector<double> values,
                           std::optional<double> step)
    : dim_(dim), nodes_(std::move(nodes)), values_(std::move(values)), step_(step) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidConfig, "mesh dimension must be positive");
  if (values_.size() != nodes_.size() * dim_) {
    throw Error(ErrorKind::DimensionMismatch, "values do not match nodes");
  }
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!std::isfinite(nodes_[k])) throw Error(ErrorKind::InvalidEndpoint, "non-finite node");
    if (k > 0 && !(nodes_[k] > nodes_[k - 1])) {
      throw Error(ErrorKind::InvalidConfig, "nodes must be strictly increasing");
    }
  }
  if (step_) {
    if (!(*step_ > 0.0)) throw Error(ErrorKind::InvalidConfig, "step must be positive");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const double expect = nodes_.front() + static_cast<double>(k) * *step_;
      if (std::abs(nodes_[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
        throw Error(ErrorKind::InvalidConfig, "nodes are not uniform with the given step");
      }
    }
  }
}

MeshFunction MeshFunction::sample(std::size_t dim, std::vector<double> nodes,
                                  const std::function<std::vector<double>(double)>& f, std::optional<double> step) {
  std::vector<double> values;
  values.reserve(nodes.size() * dim);
  for (double t : nodes) {
    auto v = f(t);
    if (v.size() != dim) throw Error(ErrorKind::DimensionMismatch, "sampler returned wrong dimension");
    values.insert(values.end(), v.begin(), v.end());
  }
  return MeshFunction(dim, std::move(nodes), std::move(values), step);
}

double MeshFunction::max_gap() const {
  double g = 0.0;
  for (std::size_t k = 1; k < nodes_.size(); ++k) g = std::max(g, nodes_[k] - nodes_[k - 1]);
  return g;
}

std::size_t MeshFunction::nearest_node(double t) const {
  if (nodes_.empty()) throw Error(ErrorKind::EmptySet, "mesh has no nodes");
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.end()) return nodes_.size() - 1;
  const auto k = static_cast<std::size_t>(it - nodes_.begin());
  if (k > 0 && t - nodes_[k - 1] <= nodes_[k] - t) return k - 1;
  return k;
}

PointCloud graph(const MeshFunction& m, const Box& window, std::size_t* dropped) {
  check_window(window, m.dim());
  std::vector<double> coords;
  coords.reserve(m.size() * (m.dim() + 1));
  for (std::size_t k = 0; k < m.size(); ++k) {
    auto p = graph_point(m, k);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  const double resolution = m.max_gap() > 0 ? m.max_gap() : m.step().value_or(1.0);
  return PointCloud::truncate(m.dim() + 1, coords, window, resolution, dropped);
}

PointCloud graph_polyline(const MeshFunction& m, const Box& window, double spacing) {
  check_window(window, m.dim());
  const std::size_t dim = m.dim() + 1;
  std::vector<double> coords;
  auto emit = [&](std::span<const double> a, std::span<const double> b, double u) {
    for (std::size_t d = 0; d < dim; ++d) coords.push_back(a[d] + u * (b[d] - a[d]));
  };
  if (m.size() == 1) {
    auto p = graph_point(m, 0);
    if (window.contains(p)) coords = p;
  }
  for (std::size_t k = 0; k + 1 < m.size(); ++k) {
    const auto a = graph_point(m, k);
    const auto b = graph_point(m, k + 1);
    auto range = clip_segment(a, b, window);
    if (!range) continue;
    const double len = norm_diff(a, b) * (range->second - range->first);
    const auto parts = static_cast<std::size_t>(std::ceil(len / spacing));
    for (std::size_t j = 0; j <= parts; ++j) {
      // Interior segment ends are emitted by the next segment.
      if (j == parts && range->second == 1.0 && k + 2 < m.size()) break;
      const double u = parts == 0 ? range->first
                                  : range->first + (range->second - range->first) * static_cast<double>(j) /
                                                       static_cast<double>(parts);
      emit(a, b, u);
    }
  }
  return PointCloud::truncate(dim, coords, window, spacing);
}

PointCloud candidate_graph(const LimitCandidate& cand, const Box& window, double spacing) {
  check_window(window, cand.dim);
  const std::size_t dim = cand.dim + 1;
  std::vector<double> coords;
  auto point = [&](double t) {
    std::vector<double> p{t};
    auto v = cand.eval(t);
    p.insert(p.end(), v.begin(), v.end());
    return p;
  };
  auto finite = [](const std::vector<double>& p) {
    return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); });
  };
  auto keep = [&](const std::vector<double>& p) {
    if (finite(p)) coords.insert(coords.end(), p.begin(), p.end());
  };
  // Non-finite values (a pole of the candidate) are dropped from the cloud.
  std::function<void(double, const std::vector<double>&, double, const std::vector<double>&, int)> refine =
      [&](double t0, const std::vector<double>& p0, double t1, const std::vector<double>& p1, int depth) {
        const bool f0 = finite(p0), f1 = finite(p1);
        if ((!f0 && !f1) || (f0 && f1 && norm_diff(p0, p1) <= spacing) || depth >= 24) {
          keep(p1);
          return;
        }
        const double tm = 0.5 * (t0 + t1);
        const auto pm = point(tm);
        refine(t0, p0, tm, pm, depth + 1);
        refine(tm, pm, t1, p1, depth + 1);
      };
  const auto domain = domain_in_window(cand, window);
  for (const auto& iv : domain.intervals()) {
    auto p = point(iv.lo);
    keep(p);
    if (iv.hi == iv.lo) continue;
    const auto n = static_cast<std::size_t>(std::ceil((iv.hi - iv.lo) / spacing));
    double t_prev = iv.lo;
    for (std::size_t j = 1; j <= n; ++j) {
      const double t = j == n ? iv.hi : iv.lo + (iv.hi - iv.lo) * static_cast<double>(j) / static_cast<double>(n);
      auto q = point(t);
      refine(t_prev, p, t, q, 0);
      t_prev = t;
      p = std::move(q);
    }
  }
  // The cloud window only needs to contain the points; the value range of
  // the candidate may exceed the estimation window.
  std::vector<double> lo = window.lo, hi = window.hi;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const std::size_t d = i % dim;
    lo[d] = std::min(lo[d], coords[i]);
    hi[d] = std::max(hi[d], coords[i]);
  }
  return PointCloud(dim, std::move(coords), Box(lo, hi), spacing);
}

double distance_to_polyline(const MeshFunction& m, std::span<const double> p) {
  if (m.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t k = m.nearest_node(p[0]);
  double best = norm_diff(graph_point(m, k), p);
  for (std::size_t j = k; j + 1 < m.size(); ++j) {
    if (m.node(j) - p[0] >= best) break;
    best = std::min(best, point_segment_distance(p, graph_point(m, j), graph_point(m, j + 1)));
  }
  for (std::size_t j = k; j > 0; --j) {
    if (p[0] - m.node(j) >= best) break;
    best = std::min(best, point_segment_distance(p, graph_point(m, j - 1), graph_point(m, j)));
  }
  return best;
}

SetSequence graph_sequence(const MeshFamily& fam, const Box& window, double spacing) {
  SetSequence seq;
  seq.kind = SetKind::cloud;
  seq.description = "graphs of " + fam.description;
  seq.first_index = fam.first_index;
  seq.generator = [fam, window, spacing](int i) -> SetValue { return graph_polyline(fam.at(i), window, spacing); };
  return seq;
}

std::vector<SubsequenceResult> canonical_subsequences(int n0, int n1, std::uint64_t seed, int draws) {
  std::vector<SubsequenceResult> out;
  auto add = [&](std::string name, auto keep) {
    SubsequenceResult r{std::move(name), {}, true};
    for (int i = n0; i <= n1; ++i) {
      if (keep(i)) r.indices.push_back(i);
    }
    if (!r.indices.empty()) out.push_back(std::move(r));
  };
  add("full", [](int) { return true; });
  add("evens", [](int i) { return i % 2 == 0; });
  add("odds", [](int i) { return i % 2 != 0; });
  add("squares", [](int i) {
    const auto r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(i))));
    return r * r == i;
  });
  for (int d = 0; d < draws; ++d) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(d + 1));
    SubsequenceResult r{"random" + std::to_string(d), {}, true};
    for (int i = n0; i <= n1; ++i) {
      if (rng() >> 63) r.indices.push_back(i);
    }
    if (r.indices.empty()) r.indices.push_back(n1);
    out.push_back(std::move(r));
  }
  return out;
}

ConvergenceReport naive_evaluation_test(const MeshFamily& fam, const LimitCandidate& cand,
                                        const EstimationConfig& cfg) {
  cfg.validate();
  ConvergenceReport rep;
  rep.criterion = Criterion::naive0;
  const auto tail = tail_meshes(fam, cfg);
  const auto ts = sample_net(domain_in_window(cand, cfg.window), cfg.eps);
  const auto sel = select_nodes(tail, ts, cand);
  std::vector<int> full;
  for (int i = cfg.n0; i <= cfg.n1; ++i) full.push_back(i);
  auto a = evaluate_subsequence(sel, tail, ts, full, cfg);
  rep.sampled_points = static_cast<int>(ts.size());
  rep.approached_points = a.approached;
  rep.vacuous_points = rep.sampled_points - a.approached;
  rep.subsequences.push_back({"full", full, a.passed});
  if (!a.passed) {
    rep.verdict.status = Status::fail;
    rep.verdict.witnesses.push_back(*a.witness);
  }
  return rep;
}

ConvergenceReport restricted_test(const MeshFamily& fam, const LimitCandidate& cand, const EstimationConfig& cfg,
                                  std::uint64_t seed) {
  cfg.validate();
  ConvergenceReport rep;
  rep.criterion = Criterion::restricted1;
  const auto tail = tail_meshes(fam, cfg);
  const auto ts = sample_net(domain_in_window(cand, cfg.window), cfg.eps);
  const auto sel = select_nodes(tail, ts, cand);
  rep.sampled_points = static_cast<int>(ts.size());
  rep.subsequences = canonical_subsequences(cfg.n0, cfg.n1, seed);
  for (auto& sub : rep.subsequences) {
    auto a = evaluate_subsequence(sel, tail, ts, sub.indices, cfg);
    sub.passed = a.passed;
    if (sub.name == "full") {
      rep.approached_points = a.approached;
      rep.vacuous_points = rep.sampled_points - a.approached;
    }
    if (!a.passed && rep.verdict.witnesses.size() < 8) {
      a.witness->clause += " (" + sub.name + ")";
      rep.verdict.witnesses.push_back(*a.witness);
    }
  }
  // Clause (b): every sampled point is approached by the whole tail.
  for (std::size_t s = 0; s < ts.size(); ++s) {
    for (std::size_t j = tail.size(); j-- > 0;) {
      if (sel[s][j].distance > cfg.eps + default_tol) {
        if (rep.verdict.witnesses.size() < 8) {
          rep.verdict.witnesses.push_back(
              {cfg.n0 + static_cast<int>(j), {ts[s]}, "domain point not approached by nodes"});
        }
        rep.verdict.status = Status::fail;
        break;
      }
    }
  }
  if (!rep.verdict.witnesses.empty()) rep.verdict.status = Status::fail;
  return rep;
}

ConvergenceReport fell_test(const MeshFamily& fam, const LimitCandidate& cand, const EstimationConfig& cfg) {
  cfg.validate();
  check_window(cfg.window, cand.dim);
  ConvergenceReport rep;
  rep.criterion = Criterion::fell2;
  const double spacing = cfg.grid_pitch / 2.0;

  // Clause (a): cluster points of the graphs lie near the candidate graph.
  const auto seq = graph_sequence(fam, cfg.window, spacing);
  const auto ls = std::get<PointCloud>(ls_estimate(seq, cfg));
  const auto cand_graph = candidate_graph(cand, cfg.window, spacing);
  const PointIndex cand_index(cand_graph);
  const auto domain = domain_in_window(cand, cfg.window);
  struct Bad {
    std::vector<double> p;
    double score;
    bool spurious;
  };
  std::vector<Bad> bad;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto p = ls.point(i);
    const double dx = domain.empty() ? std::numeric_limits<double>::infinity() : distance_to(domain, p[0]);
    if (dx > 2.0 * cfg.eps + default_tol) {
      bad.push_back({{p.begin(), p.end()}, dx, true});
      continue;
    }
    const double d = cand_index.nearest_distance(p).value_or(std::numeric_limits<double>::infinity());
    if (d > 2.0 * cfg.eps + default_tol) bad.push_back({{p.begin(), p.end()}, d, false});
  }
  std::stable_sort(bad.begin(), bad.end(), [](const Bad& a, const Bad& b) { return a.score > b.score; });
  std::vector<Bad> reps;
  for (auto& b : bad) {
    const bool far = std::all_of(reps.begin(), reps.end(),
                                 [&](const Bad& r) { return norm_diff(r.p, b.p) >= 4.0 * cfg.eps; });
    if (far) reps.push_back(std::move(b));
    if (reps.size() == 4) break;
  }
  for (auto& r : reps) {
    rep.verdict.witnesses.push_back(
        {std::nullopt, std::move(r.p),
         r.spurious ? "spurious cluster point off the candidate domain" : "cluster point off the candidate graph"});
  }

  // Clause (b): every sampled graph point of the candidate is approached by
  // every tail graph.
  std::vector<MeshFunction> tail;
  for (int i = cfg.n0; i <= cfg.n1; ++i) tail.push_back(fam.at(i));
  const auto ts = sample_net(domain, cfg.eps);
  rep.sampled_points = static_cast<int>(ts.size());
  std::size_t clause_b = 0;
  for (double t : ts) {
    std::vector<double> p{t};
    auto v = cand.eval(t);
    p.insert(p.end(), v.begin(), v.end());
    if (!cfg.window.contains(p, default_tol)) {
      ++rep.skipped_points;
      continue;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::optional<int> failing;
    for (std::size_t j = 0; j < tail.size(); ++j) {
      const double d = distance_to_polyline(tail[j], p);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      if (d > cfg.eps + default_tol) failing = cfg.n0 + static_cast<int>(j);
    }
    if (failing) {
      if (clause_b++ < 4) rep.verdict.witnesses.push_back({failing, p, "candidate graph point not approached"});
    } else {
      ++rep.approached_points;
      rep.cauchy_spread = std::max(rep.cauchy_spread, hi + lo);
    }
  }
  if (!rep.verdict.witnesses.empty()) rep.verdict.status = Status::fail;
  return rep;
}

ConvergenceReport classical_test(const MeshFamily& fam, const LimitCandidate& cand, double t_star,
                                 const ClassicalConfig& cfg) {
  if (!fam.parameter) throw Error(ErrorKind::InvalidConfig, "family is not keyed by step");
  if (cfg.last < cfg.first) throw Error(ErrorKind::BadWindow, "empty refinement range");
  ConvergenceReport rep;
  rep.criterion = Criterion::classical;
  for (int i = cfg.first; i <= cfg.last; ++i) {
    const auto m = fam.at(i);
    if (m.empty() || m.nodes().back() < t_star - 1e-9) {
      throw Error(ErrorKind::DomainMismatch, "mesh " + std::to_string(i) + " does not reach t_star");
    }
    if (!cand.domain.contains(m.node(0), 1e-9) || !cand.domain.contains(t_star, 1e-9) ||
        set_intersection(cand.domain, ClosedSet1D::interval(m.node(0), t_star)).size() != 1) {
      throw Error(ErrorKind::DomainMismatch, "candidate domain does not cover the mesh range");
    }
    double e = 0.0;
    for (std::size_t k = 0; k < m.size() && m.node(k) <= t_star + 1e-9; ++k) {
      e = std::max(e, norm_diff(m.value(k), cand.eval(m.node(k))));
    }
    rep.error_table.push_back({fam.parameter(i), e});
  }
  std::vector<double> xs, ys;
  for (const auto& row : rep.error_table) {
    if (row.error > 0.0) {
      xs.push_back(std::log(row.h));
      ys.push_back(std::log(row.error));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      mx += xs[k] / n;
      my += ys[k] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxx += (xs[k] - mx) * (xs[k] - mx);
      sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (sxx > 0.0) {
      const double slope = sxy / sxx;
      double ss = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = ys[k] - (my + slope * (xs[k] - mx));
        ss += r * r;
      }
      rep.order = slope;
      rep.residual = std::sqrt(ss / n);
    }
  }
  for (std::size_t k = 1; k < rep.error_table.size(); ++k) {
    const auto& prev = rep.error_table[k - 1];
    const auto& cur = rep.error_table[k];
    if (cur.error > prev.error * (1.0 + 1e-9) + 1e-11) {
      rep.verdict.status = Status::fail;
      rep.verdict.witnesses.push_back({cfg.first + static_cast<int>(k), {cur.h, cur.error}, "error increased"});
    }
  }
  const auto& last = rep.error_table.back();
  if (last.error > cfg.eps) {
    rep.verdict.status = Status::fail;
    rep.verdict.witnesses.push_back({cfg.last, {last.h, last.error}, "error above tolerance at finest step"});
  }
  return rep;
}

ConvergenceReport compact_open_test(const MeshFamily& fam, const LimitCandidate& cand,
                                    const std::vector<ClosedSet1D>& k_windows, const EstimationConfig& cfg) {
  cfg.validate();
  ConvergenceReport rep;
  rep.criterion = Criterion::compact_open;
  const int first = std::max(fam.first_index, 1);
  if (cfg.n0 < first) throw Error(ErrorKind::BadWindow, "tail window starts before the first index");
  std::vector<MeshFunction> members;
  for (int i = first; i <= cfg.n1; ++i) members.push_back(fam.at(i));
  for (const auto& k : k_windows) {
    WindowResult w{k, std::nullopt, false};
    std::optional<Witness> last_bad;
    for (int i = first; i <= cfg.n1; ++i) {
      const auto& m = members[static_cast<std::size_t>(i - first)];
      std::optional<Witness> bad;
      for (std::size_t n = 0; n < m.size() && !bad; ++n) {
        const double x = m.node(n);
        if (!k.contains(x, default_tol) || cand.domain.empty() || distance_to(cand.domain, x) > cfg.eps) continue;
        const auto want = cand.eval(nearest_point(cand.domain, x));
        if (norm_diff(m.value(n), want) > cfg.eps + default_tol) {
          std::vector<double> p{x};
          p.insert(p.end(), m.value(n).begin(), m.value(n).end());
          bad = Witness{i, std::move(p), "value off the candidate on compact window"};
        }
      }
      if (bad) {
        w.final_index.reset();
        last_bad = std::move(bad);
      } else if (!w.final_index) {
        w.final_index = i;
      }
    }
    w.passed = w.final_index && *w.final_index <= cfg.n0;
    if (!w.passed) {
      rep.verdict.status = Status::fail;
      if (last_bad) rep.verdict.witnesses.push_back(*last_bad);
    }
    rep.windows.push_back(std::move(w));
  }
  return rep;
}

GraphLimitScan graph_limit_scan(const MeshFamily& fam, const EstimationConfig& cfg) {
  const auto seq = graph_sequence(fam, cfg.window, cfg.grid_pitch / 2.0);
  auto est = std::get<PointCloud>(ls_estimate(seq, cfg));
  GraphLimitScan out{est, true, std::nullopt};
  struct Column {
    double x;
    std::vector<double> lo, hi;
  };
  std::vector<Column> cols;
  // Points come sorted by grid key, so equal first coordinates are adjacent.
  for (std::size_t i = 0; i < est.size();) {
    Column c{est.point(i)[0], std::vector<double>(est.dim(), std::numeric_limits<double>::infinity()),
             std::vector<double>(est.dim(), -std::numeric_limits<double>::infinity())};
    std::size_t j = i;
    for (; j < est.size() && est.point(j)[0] == c.x; ++j) {
      for (std::size_t d = 1; d < est.dim(); ++d) {
        c.lo[d] = std::min(c.lo[d], est.point(j)[d]);
        c.hi[d] = std::max(c.hi[d], est.point(j)[d]);
      }
    }
    cols.push_back(std::move(c));
    i = j;
  }
  auto column_near = [&](double x) -> const Column* {
    auto it = std::lower_bound(cols.begin(), cols.end(), x, [](const Column& c, double v) { return c.x < v; });
    const Column* best = nullptr;
    for (auto k : {it, it == cols.begin() ? it : std::prev(it)}) {
      if (k == cols.end()) continue;
      if (std::abs(k->x - x) <= 0.5 * cfg.grid_pitch + default_tol && (!best || std::abs(k->x - x) < std::abs(best->x - x))) {
        best = &*k;
      }
    }
    return best;
  };
  // A single-valued curve of slope k fattened by eps spans about
  // 2 eps sqrt(1 + k^2) per column; k is the larger one-sided slope of the
  // column midpoints over 2 eps.
  double worst = 0.0;
  for (const auto& c : cols) {
    const Column* left = column_near(c.x - 2.0 * cfg.eps);
    const Column* right = column_near(c.x + 2.0 * cfg.eps);
    for (std::size_t d = 1; d < est.dim(); ++d) {
      const double span = c.hi[d] - c.lo[d];
      const double mid = 0.5 * (c.lo[d] + c.hi[d]);
      double slope = 0.0;
      for (const Column* n : {left, right}) {
        if (n) slope = std::max(slope, std::abs(0.5 * (n->lo[d] + n->hi[d]) - mid) / std::abs(n->x - c.x));
      }
      const double allowed = std::max(3.0 * cfg.eps, 2.0 * cfg.eps * std::sqrt(1.0 + slope * slope) + cfg.eps);
      if (span > allowed && span - allowed > worst) {
        worst = span - allowed;
        out.is_graph = false;
        out.column = c.x;
      }
    }
  }
  return out;
}

}  // namespace fellscope
