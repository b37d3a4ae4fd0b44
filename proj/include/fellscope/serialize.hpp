#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fellscope/closed_sets.hpp"
#include "fellscope/finite_top.hpp"
#include "fellscope/kuratowski.hpp"
#include "fellscope/partial_maps.hpp"

namespace fellscope {

using Json = nlohmann::ordered_json;

enum class Format { json, csv, svg };

std::string_view to_string(Format f);
Format format_from_string(std::string_view s);

/// Formats with %.12g.
std::string format_number(double x);

/// Serialized text of a document: every float rounded to 12 significant
/// digits, non-finite floats written as strings, two-space indent.
std::string dump(const Json& j);

Json to_json(const ClosedSet1D& s);
Json to_json(const Box& b);
Json to_json(const PointCloud& c);
Json to_json(const SetValue& s);
Json to_json(const Witness& w);
Json to_json(const Verdict& v);
Json to_json(const EstimationConfig& cfg);
Json to_json(const MeshFunction& m);
Json to_json(const ConvergenceReport& r);
Json to_json(const FiniteCriterion& c);
Json to_json(const FiniteTopology& t);

ClosedSet1D closed_set_from_json(const Json& j);
Box box_from_json(const Json& j);
MeshFunction mesh_from_json(const Json& j);
FiniteCriterion criterion_from_json(const Json& j);
FiniteTopology topology_from_json(const Json& j);

/// Applies the fields present in `j` (eps, n0, n1, grid_pitch, window) and
/// rejects unknown keys with InvalidConfig.
EstimationConfig apply_config(EstimationConfig cfg, const Json& j);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Series {
  std::string name;
  bool polyline = false;
  std::vector<std::array<double, 2>> points;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_log = false;
  std::vector<Series> series;
};

std::string to_csv(const Table& t);
std::string to_svg(const Plot& p);

/// Error table of a classical report; FormatError for other criteria.
Table error_table(const ConvergenceReport& r);
/// Error curve of a classical report on log-log axes.
Plot error_plot(const ConvergenceReport& r);
/// Scatter plot of a 2-D cloud or a 1-D set (drawn on y = 0).
Plot set_plot(const SetValue& s, const std::string& title);

/// Report text in the requested format. Unsupported pairs throw FormatError.
std::string emit_report(const ConvergenceReport& r, Format f);
std::string emit_report(const Verdict& v, Format f);
std::string emit_report(const FiniteTopology& t, Format f);
std::string emit_report(const SetValue& s, Format f);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fellscope
