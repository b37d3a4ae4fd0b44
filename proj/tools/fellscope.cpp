// Command-line front end: scenario runs and finite-topology utilities.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fellscope/finite_top.hpp"
#include "fellscope/scenarios.hpp"
#include "fellscope/serialize.hpp"

using namespace fellscope;

namespace {

constexpr int exit_unexpected = 1;
constexpr int exit_error = 2;

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

/// "1>2,2>3" -> arrows.
std::vector<std::pair<int, int>> parse_arrows(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto gt = item.find('>');
    if (gt == std::string::npos) throw Error(ErrorKind::ParseError, "arrow '" + item + "' is not of the form a>b");
    try {
      out.emplace_back(std::stoi(item.substr(0, gt)), std::stoi(item.substr(gt + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "arrow '" + item + "' is not of the form a>b");
    }
  }
  return out;
}

/// "∅,1,12,123" -> opens.
std::vector<Subset> parse_opens(const std::string& text, int n) {
  std::vector<Subset> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_subset(item, n));
  return out;
}

std::string pretty(const FiniteTopology& t) {
  std::string out = "{";
  for (std::size_t k = 0; k < t.opens().size(); ++k) out += (k ? ", " : "") + format_subset(t.opens()[k], t.n());
  return out + "}";
}

std::string pretty(const FiniteCriterion& c) {
  std::string out;
  for (auto [a, b] : c.arrows()) {
    if (a != b) out += (out.empty() ? "" : ", ") + std::to_string(a) + "->" + std::to_string(b);
  }
  return out.empty() ? "(reflexive only)" : out;
}

FiniteCriterion criterion_arg(const std::string& arrows, const std::string& file, int n) {
  if (!file.empty()) return criterion_from_json(read_json_file(file));
  return FiniteCriterion(n, parse_arrows(arrows));
}

struct RunArgs {
  std::string scenario = "all";
  bool check = false;
  std::string out;
  std::optional<double> eps;
  std::optional<int> horizon;
  std::string format = "json";
  std::string config;
};

int run_scenarios(const RunArgs& args) {
  ScenarioOptions opt;
  opt.eps = args.eps;
  opt.horizon = args.horizon;
  if (!args.config.empty()) opt.config = read_json_file(args.config);
  const Format format = format_from_string(args.format);

  std::vector<const Scenario*> chosen;
  if (args.scenario == "all") {
    for (const auto& s : scenario_registry()) chosen.push_back(&s);
  } else {
    chosen.push_back(&find_scenario(args.scenario));
  }
  if (!args.out.empty()) std::filesystem::create_directories(args.out);

  bool all_expected = true;
  for (const auto* s : chosen) {
    const auto report = s->run(opt);
    const bool ok = report.as_expected();
    all_expected = all_expected && ok;
    std::cout << report.name << ": " << (ok ? "as expected" : "UNEXPECTED") << "\n";
    for (const auto& v : report.verdicts) {
      if (!args.check && v.as_expected()) continue;
      std::cout << "  " << v.key << " = " << to_string(v.status);
      if (v.expected) std::cout << " (expected " << to_string(*v.expected) << ")";
      if (!v.as_expected()) std::cout << "  MISMATCH";
      std::cout << "\n";
    }
    if (!args.out.empty()) {
      const auto path = std::filesystem::path(args.out) / (report.name + "." + std::string(to_string(format)));
      try {
        write_atomic(path, emit_report(report, format));
      } catch (const Error& e) {
        // A batch run skips scenarios without that kind of output.
        if (e.kind() != ErrorKind::FormatError || chosen.size() == 1) throw;
        std::cerr << "note: " << e.what() << "\n";
      }
    }
  }
  return all_expected ? 0 : exit_unexpected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fellscope: set convergence, hyperspace topologies and mesh-function limits"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a named scenario, or the whole registry");
  run_cmd->add_option("scenario", run.scenario, "Scenario name, or 'all' (default)");
  run_cmd->add_flag("--check", run.check, "Print every verdict against its expectation");
  run_cmd->add_option("--out", run.out, "Directory for report files");
  run_cmd->add_option("--eps", run.eps, "Cluster radius override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--horizon", run.horizon, "Tail horizon n1 override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--format", run.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  run_cmd->add_option("--config", run.config, "JSON file overriding estimation config fields");

  app.add_subcommand("list", "List registered scenarios");

  auto* ft = app.add_subcommand("finite-top", "Finite topologies from constant-net criteria");
  ft->require_subcommand(1);
  int n = 3;
  bool as_json = false;
  std::string arrows, criterion_file, opens, arrows2, criterion_file2;
  auto* gen = ft->add_subcommand("gen", "Topology generated by a criterion");
  gen->add_option("-n", n, "Ground set size")->check(CLI::Range(1, max_criterion_size));
  gen->add_option("--arrows", arrows, "Arrows as a>b pairs, e.g. 1>2,2>3");
  gen->add_option("--criterion", criterion_file, "Criterion JSON {n, arrows}");
  gen->add_flag("--json", as_json, "JSON output");
  auto* spec = ft->add_subcommand("spec", "Specialization criterion of a topology");
  spec->add_option("-n", n, "Ground set size")->check(CLI::Range(1, max_criterion_size));
  spec->add_option("--opens", opens, "Open sets in compact notation, e.g. ∅,1,12,123")->required();
  spec->add_flag("--json", as_json, "JSON output");
  auto* lattice = ft->add_subcommand("lattice", "Meets and joins of two criteria and their topologies");
  lattice->add_option("-n", n, "Ground set size")->check(CLI::Range(1, max_criterion_size));
  lattice->add_option("--arrows1", arrows, "First criterion arrows");
  lattice->add_option("--arrows2", arrows2, "Second criterion arrows");
  lattice->add_option("--criterion1", criterion_file, "First criterion JSON");
  lattice->add_option("--criterion2", criterion_file2, "Second criterion JSON");
  lattice->add_flag("--json", as_json, "JSON output");
  int census_max = 4;
  auto* census = ft->add_subcommand("census", "Count topologies on n points");
  census->add_option("-n", census_max, "Largest n (at most 5)");
  census->add_flag("--json", as_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_error;
  }

  try {
    if (run_cmd->parsed()) return run_scenarios(run);
    if (app.got_subcommand("list")) {
      for (const auto& s : scenario_registry()) std::cout << s.name << "  " << s.description << "\n";
      return 0;
    }
    if (gen->parsed()) {
      const auto c = criterion_arg(arrows, criterion_file, n);
      const auto t = generate_topology(c);
      const auto top = is_topological(c);
      if (as_json) {
        Json j{{"criterion", to_json(c)}, {"topology", to_json(t)}, {"topological", top.topological}};
        if (top.missing_arrow) j["missing_arrow"] = {top.missing_arrow->first, top.missing_arrow->second};
        std::cout << dump(j);
      } else {
        std::cout << "criterion: " << pretty(c) << "\n";
        std::cout << "opens: " << pretty(t) << "\n";
        std::cout << "topological: " << (top.topological ? "yes" : "no");
        if (top.missing_arrow) {
          std::cout << " (missing " << top.missing_arrow->first << "->" << top.missing_arrow->second << ")";
        }
        std::cout << "\n";
      }
      return 0;
    }
    if (spec->parsed()) {
      const FiniteTopology t(n, parse_opens(opens, n));
      const auto c = specialization_criterion(t);
      if (as_json) {
        std::cout << dump(Json{{"topology", to_json(t)}, {"criterion", to_json(c)}});
      } else {
        std::cout << "opens: " << pretty(t) << "\n" << "arrows: " << pretty(c) << "\n";
      }
      return 0;
    }
    if (lattice->parsed()) {
      const auto c1 = criterion_arg(arrows, criterion_file, n);
      const auto c2 = criterion_arg(arrows2, criterion_file2, n);
      const auto t1 = generate_topology(c1), t2 = generate_topology(c2);
      const auto meet = topology_meet(t1, t2), join = topology_join(t1, t2);
      const auto from_or = generate_topology(criterion_or(c1, c2));
      const auto from_and = generate_topology(criterion_and(c1, c2));
      if (as_json) {
        std::cout << dump(Json{{"tau1", to_json(t1)},
                               {"tau2", to_json(t2)},
                               {"meet", to_json(meet)},
                               {"join", to_json(join)},
                               {"or_generated", to_json(from_or)},
                               {"and_generated", to_json(from_and)},
                               {"or_equals_meet", from_or == meet},
                               {"and_finer_than_join", from_and.finer_or_equal(join)}});
      } else {
        std::cout << "tau1: " << pretty(t1) << "\n" << "tau2: " << pretty(t2) << "\n";
        std::cout << "meet: " << pretty(meet) << "\n" << "join: " << pretty(join) << "\n";
        std::cout << "or generates: " << pretty(from_or) << (from_or == meet ? "  (= meet)" : "  (!= meet)") << "\n";
        std::cout << "and generates: " << pretty(from_and)
                  << (from_and == join ? "  (= join)" : (from_and.finer_or_equal(join) ? "  (finer than join)" : ""))
                  << "\n";
      }
      return 0;
    }
    if (census->parsed()) {
      Json counts = Json::array();
      for (int k = 1; k <= census_max; ++k) {
        const auto count = enumerate_topologies(k).size();
        counts.push_back(Json{{"n", k}, {"topologies", count}});
        if (!as_json) std::cout << k << ": " << count << "\n";
      }
      if (as_json) std::cout << dump(counts);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
  return 0;
}
