#include "fellscope/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace fellscope {

namespace {

Json number(double x) { return x; }

Json points_json(const std::vector<double>& p) {
  Json a = Json::array();
  for (double x : p) a.push_back(number(x));
  return a;
}

void round_all(Json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::isnan(x)) {
      j = "nan";
    } else if (std::isinf(x)) {
      j = x > 0 ? "inf" : "-inf";
    } else {
      j = std::strtod(format_number(x).c_str(), nullptr);
    }
    return;
  }
  if (j.is_array() || j.is_object()) {
    for (auto& v : j) round_all(v);
  }
}

double as_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorKind::ParseError, "expected a number, got " + j.dump());
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string_view to_string(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::svg: return "svg";
  }
  return "?";
}

Format format_from_string(std::string_view s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "svg") return Format::svg;
  throw Error(ErrorKind::FormatError, "unknown format '" + std::string(s) + "'");
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string dump(const Json& j) {
  Json copy = j;
  round_all(copy);
  return copy.dump(2) + "\n";
}

Json to_json(const ClosedSet1D& s) {
  Json a = Json::array();
  for (const auto& iv : s.intervals()) a.push_back(Json::array({number(iv.lo), number(iv.hi)}));
  return a;
}

Json to_json(const Box& b) {
  return Json{{"lo", points_json(b.lo)}, {"hi", points_json(b.hi)}};
}

Json to_json(const PointCloud& c) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto p = c.point(i);
    pts.push_back(points_json({p.begin(), p.end()}));
  }
  return Json{{"dim", c.dim()}, {"window", to_json(c.window())}, {"resolution", number(c.resolution())},
              {"points", std::move(pts)}};
}

Json to_json(const SetValue& s) {
  return std::visit([](const auto& v) { return to_json(v); }, s);
}

Json to_json(const Witness& w) {
  Json j;
  if (w.index) j["index"] = *w.index;
  j["point"] = points_json(w.point);
  j["clause"] = w.clause;
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["status"] = std::string(to_string(v.status));
  if (v.final_index) j["final_index"] = *v.final_index;
  Json ws = Json::array();
  for (const auto& w : v.witnesses) ws.push_back(to_json(w));
  j["witnesses"] = std::move(ws);
  return j;
}

Json to_json(const EstimationConfig& cfg) {
  return Json{{"eps", number(cfg.eps)},
              {"n0", cfg.n0},
              {"n1", cfg.n1},
              {"grid_pitch", number(cfg.grid_pitch)},
              {"window", to_json(cfg.window)}};
}

Json to_json(const MeshFunction& m) {
  Json j;
  j["nodes"] = points_json(m.nodes());
  Json vals = Json::array();
  for (std::size_t k = 0; k < m.size(); ++k) {
    auto v = m.value(k);
    vals.push_back(points_json({v.begin(), v.end()}));
  }
  j["values"] = std::move(vals);
  if (m.step()) j["step"] = number(*m.step());
  if (m.truncation) {
    j["truncation"] = Json{{"reason", std::string(to_string(m.truncation->reason))},
                           {"step", m.truncation->step},
                           {"t", number(m.truncation->t)}};
  }
  return j;
}

Json to_json(const ConvergenceReport& r) {
  Json j;
  j["criterion"] = std::string(to_string(r.criterion));
  j["verdict"] = to_json(r.verdict);
  Json data;
  switch (r.criterion) {
    case Criterion::naive0:
    case Criterion::restricted1:
    case Criterion::fell2: {
      data["sampled_points"] = r.sampled_points;
      data["approached_points"] = r.approached_points;
      if (r.criterion != Criterion::fell2) data["vacuous_points"] = r.vacuous_points;
      if (r.criterion == Criterion::fell2) {
        data["skipped_points"] = r.skipped_points;
        data["cauchy_spread"] = number(r.cauchy_spread);
      }
      if (!r.subsequences.empty()) {
        Json subs = Json::array();
        for (const auto& s : r.subsequences) {
          subs.push_back(Json{{"name", s.name}, {"length", s.indices.size()}, {"passed", s.passed}});
        }
        data["subsequences"] = std::move(subs);
      }
      break;
    }
    case Criterion::classical: {
      Json rows = Json::array();
      for (const auto& row : r.error_table) rows.push_back(Json{{"h", number(row.h)}, {"error", number(row.error)}});
      data["error_table"] = std::move(rows);
      data["order"] = r.order ? Json(number(*r.order)) : Json(nullptr);
      data["residual"] = r.residual ? Json(number(*r.residual)) : Json(nullptr);
      break;
    }
    case Criterion::compact_open: {
      Json ws = Json::array();
      for (const auto& w : r.windows) {
        ws.push_back(Json{{"k", to_json(w.k)},
                          {"final_index", w.final_index ? Json(*w.final_index) : Json(nullptr)},
                          {"passed", w.passed}});
      }
      data["windows"] = std::move(ws);
      break;
    }
  }
  j["data"] = std::move(data);
  return j;
}

Json to_json(const FiniteCriterion& c) {
  Json arrows = Json::array();
  for (auto [a, b] : c.arrows()) arrows.push_back(Json::array({a, b}));
  return Json{{"n", c.n()}, {"arrows", std::move(arrows)}};
}

Json to_json(const FiniteTopology& t) {
  Json opens = Json::array();
  for (auto u : t.opens()) opens.push_back(subset_elements(u, t.n()));
  return Json{{"opens", std::move(opens)}};
}

ClosedSet1D closed_set_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "closed set must be a list of [lo, hi] pairs");
  std::vector<Interval> ivs;
  for (const auto& iv : j) {
    if (iv.is_array() && iv.size() == 2) {
      const double lo = as_double(iv[0]), hi = as_double(iv[1]);
      if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorKind::InvalidEndpoint, "non-finite endpoint");
      ivs.push_back({lo, hi});
    } else if (iv.is_number()) {
      ivs.push_back({iv.get<double>(), iv.get<double>()});
    } else {
      throw Error(ErrorKind::ParseError, "bad interval " + iv.dump());
    }
  }
  return normalize(std::move(ivs));
}

Box box_from_json(const Json& j) {
  std::vector<double> lo, hi;
  try {
    for (const auto& x : j.at("lo")) lo.push_back(as_double(x));
    for (const auto& x : j.at("hi")) hi.push_back(as_double(x));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad box: ") + e.what());
  }
  if (lo.size() != hi.size() || lo.empty()) throw Error(ErrorKind::BadWindow, "box bounds differ in length");
  return Box(std::move(lo), std::move(hi));
}

MeshFunction mesh_from_json(const Json& j) {
  try {
    std::vector<double> nodes;
    for (const auto& x : j.at("nodes")) nodes.push_back(as_double(x));
    std::vector<double> values;
    std::size_t dim = 0;
    for (const auto& v : j.at("values")) {
      const auto row = v.is_array() ? v : Json::array({v});
      if (dim == 0) dim = row.size();
      if (row.size() != dim) throw Error(ErrorKind::DimensionMismatch, "ragged values");
      for (const auto& x : row) values.push_back(as_double(x));
    }
    std::optional<double> step;
    if (j.contains("step") && !j["step"].is_null()) step = as_double(j["step"]);
    return MeshFunction(dim == 0 ? 1 : dim, std::move(nodes), std::move(values), step);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad mesh: ") + e.what());
  }
}

FiniteCriterion criterion_from_json(const Json& j) {
  try {
    FiniteCriterion c(j.at("n").get<int>());
    for (const auto& a : j.at("arrows")) c.add(a.at(0).get<int>(), a.at(1).get<int>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad criterion: ") + e.what());
  }
}

FiniteTopology topology_from_json(const Json& j) {
  try {
    int n = j.contains("n") ? j["n"].get<int>() : 0;
    if (n == 0) {
      for (const auto& u : j.at("opens")) {
        for (const auto& e : u) n = std::max(n, e.get<int>());
      }
    }
    std::vector<Subset> opens;
    for (const auto& u : j.at("opens")) opens.push_back(subset_from_elements(u.get<std::vector<int>>(), n));
    return FiniteTopology(n, std::move(opens));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad topology: ") + e.what());
  }
}

EstimationConfig apply_config(EstimationConfig cfg, const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "eps") {
        cfg.eps = as_double(value);
      } else if (key == "n0") {
        cfg.n0 = value.get<int>();
      } else if (key == "n1") {
        cfg.n1 = value.get<int>();
      } else if (key == "grid_pitch") {
        cfg.grid_pitch = as_double(value);
      } else if (key == "window") {
        cfg.window = box_from_json(value);
      } else {
        throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad config value: ") + e.what());
  }
  return cfg;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += "\n";
  }
  return out;
}

std::string to_svg(const Plot& p) {
  constexpr double width = 640, height = 480, margin = 56;
  auto tx = [&](double v) { return p.log_log ? std::log10(v) : v; };
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : p.series) {
    for (const auto& pt : s.points) {
      if (p.log_log && (pt[0] <= 0 || pt[1] <= 0)) continue;
      xlo = std::min(xlo, tx(pt[0]));
      xhi = std::max(xhi, tx(pt[0]));
      ylo = std::min(ylo, tx(pt[1]));
      yhi = std::max(yhi, tx(pt[1]));
    }
  }
  if (!(xlo <= xhi)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (xhi == xlo) xlo -= 0.5, xhi += 0.5;
  if (yhi == ylo) ylo -= 0.5, yhi += 0.5;
  auto sx = [&](double v) { return margin + (tx(v) - xlo) / (xhi - xlo) * (width - 2 * margin); };
  auto sy = [&](double v) { return height - margin - (tx(v) - ylo) / (yhi - ylo) * (height - 2 * margin); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(p.title) + "</text>\n";
  out += "<rect x=\"56\" y=\"56\" width=\"528\" height=\"368\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string lx = p.log_log ? "log10 " + p.x_label : p.x_label;
  const std::string ly = p.log_log ? "log10 " + p.y_label : p.y_label;
  out += "<text x=\"320\" y=\"466\" text-anchor=\"middle\" font-size=\"12\">" + xml_escape(lx) + " [" +
         format_number(xlo) + ", " + format_number(xhi) + "]</text>\n";
  out += "<text x=\"16\" y=\"240\" font-size=\"12\" transform=\"rotate(-90 16 240)\" text-anchor=\"middle\">" +
         xml_escape(ly) + " [" + format_number(ylo) + ", " + format_number(yhi) + "]</text>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = colors[k % 5];
    out += "<g id=\"" + xml_escape(s.name) + "\">\n";
    if (s.polyline) {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"";
      bool first = true;
      for (const auto& pt : s.points) {
        if (p.log_log && (pt[0] <= 0 || pt[1] <= 0)) continue;
        out += (first ? "" : " ") + fixed(sx(pt[0])) + "," + fixed(sy(pt[1]));
        first = false;
      }
      out += "\"/>\n";
    } else {
      for (const auto& pt : s.points) {
        if (p.log_log && (pt[0] <= 0 || pt[1] <= 0)) continue;
        out += "<circle cx=\"" + fixed(sx(pt[0])) + "\" cy=\"" + fixed(sy(pt[1])) + "\" r=\"1.5\" fill=\"" + color +
               "\"/>\n";
      }
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

Table error_table(const ConvergenceReport& r) {
  if (r.criterion != Criterion::classical) {
    throw Error(ErrorKind::FormatError, "CSV is only available for classical error tables");
  }
  Table t{{"h", "E"}, {}};
  for (const auto& row : r.error_table) t.rows.push_back({row.h, row.error});
  return t;
}

Plot error_plot(const ConvergenceReport& r) {
  auto t = error_table(r);
  Plot p{"error against step", "h", "E(h)", true, {{"E", true, {}}}};
  for (const auto& row : t.rows) p.series[0].points.push_back({row[0], row[1]});
  return p;
}

Plot set_plot(const SetValue& s, const std::string& title) {
  Plot p{title, "x", "y", false, {{"estimate", false, {}}}};
  auto& pts = p.series[0].points;
  if (const auto* one = std::get_if<ClosedSet1D>(&s)) {
    p.series[0].polyline = false;
    for (const auto& iv : one->intervals()) {
      const double step = std::max((iv.hi - iv.lo) / 200.0, 1e-12);
      for (double x = iv.lo; x <= iv.hi + 0.5 * step; x += step) pts.push_back({std::min(x, iv.hi), 0.0});
    }
    return p;
  }
  const auto& c = std::get<PointCloud>(s);
  if (c.dim() != 2) throw Error(ErrorKind::FormatError, "SVG needs a 1-D set or a planar cloud");
  for (std::size_t i = 0; i < c.size(); ++i) pts.push_back({c.point(i)[0], c.point(i)[1]});
  return p;
}

std::string emit_report(const ConvergenceReport& r, Format f) {
  switch (f) {
    case Format::json: return dump(to_json(r));
    case Format::csv: return to_csv(error_table(r));
    case Format::svg: return to_svg(error_plot(r));
  }
  return {};
}

std::string emit_report(const Verdict& v, Format f) {
  if (f != Format::json) throw Error(ErrorKind::FormatError, "verdicts are emitted as JSON only");
  return dump(to_json(v));
}

std::string emit_report(const FiniteTopology& t, Format f) {
  if (f != Format::json) throw Error(ErrorKind::FormatError, "topologies are emitted as JSON only");
  return dump(to_json(t));
}

std::string emit_report(const SetValue& s, Format f) {
  switch (f) {
    case Format::json: return dump(to_json(s));
    case Format::csv: {
      Table t;
      if (const auto* one = std::get_if<ClosedSet1D>(&s)) {
        t.columns = {"lo", "hi"};
        for (const auto& iv : one->intervals()) t.rows.push_back({iv.lo, iv.hi});
      } else {
        const auto& c = std::get<PointCloud>(s);
        for (std::size_t d = 0; d < c.dim(); ++d) t.columns.push_back("x" + std::to_string(d));
        for (std::size_t i = 0; i < c.size(); ++i) t.rows.emplace_back(c.point(i).begin(), c.point(i).end());
      }
      return to_csv(t);
    }
    case Format::svg: return to_svg(set_plot(s, "set estimate"));
  }
  return {};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::InvalidConfig, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::InvalidConfig, "cannot rename onto " + path.string());
  }
}

}  // namespace fellscope
