#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fellscope/kuratowski.hpp"
#include "fellscope/serialize.hpp"

namespace fellscope {

struct ScenarioOptions {
  /// Overrides the scenario's eps; the grid pitch keeps its ratio to eps.
  std::optional<double> eps;
  /// Overrides the tail horizon n1 of every estimation config.
  std::optional<int> horizon;
  /// Fragment applied to every estimation config (see apply_config).
  std::optional<Json> config;
  std::optional<std::uint64_t> seed;
  /// Runs on the image of every input under the graph homeomorphism
  /// (shifted cube in time, 2 atan in value).
  bool transformed = false;
  /// Halves eps and pitch and doubles the horizon (one more halving of h
  /// for step-indexed families).
  bool refined = false;
};

struct VerdictEntry {
  std::string key;
  Status status;
  std::optional<Status> expected;
  Json details;

  bool as_expected() const { return !expected || *expected == status; }
};

struct ScenarioReport {
  std::string name;
  std::string description;
  std::vector<VerdictEntry> verdicts;
  Json details = Json::object();
  std::optional<Table> table;
  std::optional<Plot> plot;

  bool as_expected() const;
  const VerdictEntry& verdict(const std::string& key) const;
};

struct Scenario {
  std::string name;
  std::string description;
  std::function<ScenarioReport(const ScenarioOptions&)> run;
};

const std::vector<Scenario>& scenario_registry();
/// Throws UnknownScenario.
const Scenario& find_scenario(const std::string& name);

/// FNV-1a hash of the name, or FELLSCOPE_SEED when set.
std::uint64_t scenario_seed(const std::string& name);

Json to_json(const ScenarioReport& r);
/// CSV needs a table and SVG a plot; otherwise FormatError.
std::string emit_report(const ScenarioReport& r, Format f);

}  // namespace fellscope
