// qmlab: scenario-driven front end to the checkers, variations and decompositions.
//
// Exit codes: 0 all PASS, 1 some FAIL, 2 only INCONCLUSIVE beyond PASS, 3 parse error,
// 4 any other error (unknown function, search budget, ...).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qmlab/error.hpp"
#include "qmlab/solid_extension.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace qmlab;
using namespace qmlab::cli;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> level_cap;
  std::optional<int> budget;
  std::string report;
  std::string plot_data;
};

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Inconclusive: break;
  }
  return 2;
}

void write_json(const std::string& path, const json& j) {
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Precondition, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

json variation_json(const VariationOptions& o) {
  return {{"level_cap", o.level_cap}, {"dilation_depth", o.dilation_depth}, {"budget", o.budget}};
}

json functions_json(const Scenario& s) {
  json j = json::object();
  for (const auto& [name, spec] : s.specs) j[name] = spec;
  return j;
}

// Reads the scenario and applies the global overrides; functions are rebuilt when the
// variation options change because variation-backed functions capture them.
Scenario scenario_with(const std::string& path, const Globals& g) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read scenario '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  if (doc.is_object()) {
    if (g.level_cap) doc["variation"]["level_cap"] = *g.level_cap;
    if (g.budget) doc["variation"]["budget"] = *g.budget;
    if (g.seed) doc["probe"]["seed"] = *g.seed;
  }
  return parse_scenario(doc);
}

Scenario empty_scenario(const Globals& g) {
  json doc = json::object();
  if (g.level_cap) doc["variation"]["level_cap"] = *g.level_cap;
  if (g.budget) doc["variation"]["budget"] = *g.budget;
  if (g.seed) doc["probe"]["seed"] = *g.seed;
  return parse_scenario(doc);
}

SetFunction resolve_fn(const std::string& text, const Scenario& s) {
  if (!text.empty() && text.front() == '{') {
    json spec;
    try {
      spec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string("--fn: ") + e.what());
    }
    return build_function(spec, s.functions, s.check.variation, "--fn");
  }
  const auto it = s.functions.find(text);
  if (it == s.functions.end()) throw Error(ErrorCode::UnknownFunction, "--fn: no function named '" + text + "'");
  return it->second;
}

std::vector<GridRegion> read_regions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read region file '" + path + "'");
  std::vector<GridRegion> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.empty() || line.front() == '#') continue;
    try {
      out.push_back(parse_region(line));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(n) + ": " + e.message());
    }
  }
  return out;
}

// (step, value) series for convergence plots: variations of X by level, erosions of the open
// window and growing solid squares.
void emit_plot_data(const std::string& path, const Scenario& s) {
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  out << "function\tseries\tstep\tvalue\n";
  const BoundingBox w = s.probe.window;
  for (const auto& [name, f] : s.functions) {
    if (f.window()) {
      const Variations v = variations(f, GridRegion::whole(), s.check.variation);
      const std::pair<const char*, const VariationResult*> series[] = {
          {"plus_X", &v.plus}, {"minus_X", &v.minus}, {"total_X", &v.total}};
      for (const auto& [label, r] : series) {
        for (std::size_t k = 0; k < r->by_level.size(); ++k) {
          out << name << "\t" << label << "\t" << k << "\t" << to_string(r->by_level[k]) << "\n";
        }
      }
    }
    for (int m = 0; m <= s.probe.refinement_depth; ++m) {
      const GridRegion k = GridRegion::closed(erode(CellSet::box(0, w).at_level(m)));
      out << name << "\terosion_window\t" << m << "\t" << to_string(f(k)) << "\n";
      const GridRegion sq = GridRegion::closed(CellSet::box(0, w.expanded(m)));
      out << name << "\tsolid_squares\t" << m << "\t" << to_string(f(sq)) << "\n";
    }
  }
}

int cmd_check(const std::string& path, const std::string& suite_override, const std::string& fn_override,
              const Globals& g) {
  const Scenario s = scenario_with(path, g);
  std::vector<SuiteRequest> requests = s.suites;
  if (!suite_override.empty()) {
    // Run the named suite on one function, or on every function the scenario mentions.
    std::vector<std::string> fns;
    if (!fn_override.empty()) {
      fns.push_back(fn_override);
    } else {
      for (const auto& [name, f] : s.functions) fns.push_back(name);
    }
    requests.clear();
    for (const std::string& fn : fns) {
      if (!s.functions.count(fn)) throw Error(ErrorCode::UnknownFunction, "--fn: no function named '" + fn + "'");
      SuiteRequest r;
      r.fn = fn;
      r.suite = suite_override;
      requests.push_back(r);
    }
  }
  const ProbeFamily probes(s.probe, scenario_atoms(s));
  json summary;
  summary["scenario"] = fs::path(path).filename().string();
  summary["probes"] = probes.regions().size();
  summary["suites"] = json::array();
  Verdict overall = Verdict::Pass;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const SuiteRequest& req = requests[i];
    const std::vector<CheckReport> reports = run_request(s, req, probes);
    const Verdict v = combine(reports);
    if (v == Verdict::Fail || (v == Verdict::Inconclusive && overall == Verdict::Pass)) overall = v;
    std::string detail;
    for (const CheckReport& r : reports) {
      if (!r.detail.empty()) detail += (detail.empty() ? "" : "; ") + r.check + ": " + r.detail;
    }
    std::cout << req.fn << " " << req.suite << " " << to_string(v) << (detail.empty() ? "" : "  " + detail) << "\n";
    json entry = {{"fn", req.fn}, {"suite", req.suite}, {"verdict", std::string(to_string(v))}};
    if (!detail.empty()) entry["detail"] = detail;
    summary["suites"].push_back(entry);
    if (!s.output.empty()) {
      json file;
      file["function"] = req.fn;
      file["suite"] = req.suite;
      file["verdict"] = std::string(to_string(v));
      file["variation"] = variation_json(s.check.variation);
      file["functions"] = functions_json(s);
      file["reports"] = json::array();
      for (const CheckReport& r : reports) file["reports"].push_back(to_json(r));
      const std::string name = std::to_string(i) + "_" + req.fn + "_" + req.suite + ".json";
      write_json((fs::path(s.output) / name).string(), file);
    }
  }
  summary["verdict"] = std::string(to_string(overall));
  if (!g.report.empty()) {
    write_json(g.report, summary);
  } else if (!s.output.empty()) {
    write_json((fs::path(s.output) / "summary.json").string(), summary);
  }
  if (!g.plot_data.empty()) emit_plot_data(g.plot_data, s);
  return exit_code(overall);
}

int cmd_eval(const std::string& fn, const std::string& scenario, const std::string& region_file, const Globals& g) {
  const Scenario s = scenario.empty() ? empty_scenario(g) : scenario_with(scenario, g);
  const SetFunction f = resolve_fn(fn, s);
  for (const GridRegion& r : read_regions(region_file)) std::cout << to_string(f(r)) << "\n";
  return 0;
}

json result_json(const VariationResult& r) {
  json j = {{"value", to_string(r.value)}, {"stabilized", r.stabilized}, {"level_cap", r.level_cap}};
  j["witness"] = json::array();
  for (const GridRegion& w : r.witness) j["witness"].push_back(format_region(w));
  j["by_level"] = json::array();
  for (const ExtendedValue& v : r.by_level) j["by_level"].push_back(to_string(v));
  return j;
}

int cmd_variations(const std::string& fn, const std::string& scenario, const std::string& region_file,
                   const std::string& oracle, const Globals& g) {
  const Scenario s = scenario.empty() ? empty_scenario(g) : scenario_with(scenario, g);
  const SetFunction f = resolve_fn(fn, s);
  json out = json::array();
  for (const GridRegion& r : read_regions(region_file)) {
    json j = {{"region", format_region(r)}};
    if (oracle == "search") {
      const Variations v = variations(f, r, s.check.variation);
      j["plus"] = result_json(v.plus);
      j["minus"] = result_json(v.minus);
      j["total"] = result_json(v.total);
    } else {
      // Cell-level oracles over the largest compact inside the region at its own level.
      const CellSet pool = r.kind() == Kind::Open ? erode(r.cells()) : r.cells();
      const ExtendedValue t = oracle == "naive" ? naive_total_variation(f, pool, s.check.variation.budget)
                                                : grouped_total_variation(f, pool, s.check.variation.budget);
      j["total"] = {{"value", to_string(t)}, {"oracle", oracle}};
    }
    out.push_back(j);
  }
  std::cout << out.dump(2) << "\n";
  if (!g.report.empty()) write_json(g.report, out);
  return 0;
}

int cmd_decompose(const std::string& path, const std::string& fn, const std::string& point_text, const Globals& g) {
  const Scenario s = scenario_with(path, g);
  const SetFunction mu = resolve_fn(fn, s);
  const Point p = parse_point_text(point_text);
  const ProbeFamily probes(s.probe, scenario_atoms(s));
  const Decomposition d = decompose_stm(mu, p, s.check.variation, probes.regions());
  const SetFunction diff = linear_combination({Rational(1), Rational(-1)}, {d.nu1, d.nu2});
  std::vector<CheckReport> reports;
  for (const SetFunction& nu : {d.nu1, d.nu2}) {
    CheckReport r;
    r.check = "tm:" + nu.name();
    r.parts = run_suite("tm", nu, probes, s.check);
    r.verdict = combine(r.parts);
    reports.push_back(std::move(r));
  }
  reports.push_back(check_agreement(diff, mu, probes, s.check));
  reports.back().check = "nu1 - nu2 = mu";
  Verdict v = combine(reports);
  if (!d.unstable.empty() && v == Verdict::Pass) v = Verdict::Inconclusive;
  for (const CheckReport& r : reports) std::cout << r.check << " " << to_string(r.verdict) << "\n";
  std::cout << "unsettled variation probes: " << d.unstable.size() << "\n";
  if (!g.report.empty()) {
    json j;
    j["function"] = fn;
    j["point"] = to_string(p);
    j["verdict"] = std::string(to_string(v));
    j["variation"] = variation_json(s.check.variation);
    j["reports"] = json::array();
    for (const CheckReport& r : reports) j["reports"].push_back(to_json(r));
    j["values"] = json::array();
    for (const GridRegion& r : probes.regions()) {
      j["values"].push_back({{"region", format_region(r)}, {"mu", to_string(mu(r))}, {"nu1", to_string(d.nu1(r))},
                             {"nu2", to_string(d.nu2(r))}});
    }
    write_json(g.report, j);
  }
  return exit_code(v);
}

// The function a witness was recorded against, from the report it sits in.
SetFunction witness_target(const SetFunction& f, const VariationFunctions& vf, const std::string& check,
                           const Witness& w) {
  if (check.rfind("dtm:plus(", 0) == 0) return vf.plus;
  if (check.rfind("dtm:minus(", 0) == 0) return vf.minus;
  if (check.rfind("dtm:total(", 0) == 0) return vf.total;
  if (check.rfind("minimality:", 0) == 0) return vf.plus;
  if (check == "variation_bounds" && w.note == "f- >= -f") return linear_combination({Rational(-1)}, {f});
  return f;
}

int cmd_witness(const std::string& path, const Globals& g) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read report '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  for (const char* key : {"function", "functions", "variation", "reports"}) {
    if (!doc.contains(key)) throw Error(ErrorCode::ParseError, path + ": missing '" + key + "' (not a suite report)");
  }
  json scen = {{"functions", doc.at("functions")}, {"variation", doc.at("variation")}};
  if (g.budget) scen["variation"]["budget"] = *g.budget;
  const Scenario s = parse_scenario(scen);
  const std::string name = doc.at("function").get<std::string>();
  const SetFunction f = s.functions.at(name);
  const VariationFunctions vf = variation_functions(f, s.check.variation);
  std::size_t total = 0, ok = 0;
  auto walk = [&](auto&& self, const json& report) -> void {
    const std::string check = report.at("check").get<std::string>();
    for (const json& wj : report.at("witnesses")) {
      const Witness w = witness_from_json(wj);
      const bool replayed = replay(witness_target(f, vf, check, w), w, s.check);
      ++total;
      ok += replayed ? 1 : 0;
      std::cout << check << " " << w.relation << " " << (replayed ? "REPLAYED" : "NOT REPLAYED") << "\n";
    }
    if (report.contains("parts")) {
      for (const json& p : report.at("parts")) self(self, p);
    }
  };
  for (const json& r : doc.at("reports")) walk(walk, r);
  std::cout << ok << "/" << total << " witnesses replayed\n";
  return ok == total ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmlab: exact experiments with signed and deficient topological measures on a dyadic grid"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Probe seed (overrides the scenario)");
  app.add_option("--level-cap", g.level_cap, "Finest level searched for variations");
  app.add_option("--budget", g.budget, "Maximum search pieces per level");
  app.add_option("--report", g.report, "Write the JSON report here");
  app.add_option("--emit-plot-data", g.plot_data, "Write (step, value) convergence tables here (check only)");

  std::string scenario, suite, fn, region, oracle = "search", point, report_in;
  auto* check = app.add_subcommand("check", "Run the scenario's suites");
  check->add_option("--scenario", scenario, "Scenario JSON file")->required();
  check->add_option("--suite", suite, "Run this suite instead of the scenario's list")
      ->check(CLI::IsMember({"dtm", "tm", "sdtm", "stm", "classify", "jordan", "norms", "tau_smooth", "regularity",
                             "small_sets", "solid_limits", "additivity_equivalence", "modularity", "variation_dtm"}));
  check->add_option("--fn", fn, "With --suite: only this function");

  auto* eval = app.add_subcommand("eval", "Evaluate a function on each region of a region file");
  eval->add_option("--fn", fn, "Function name from the scenario, or a JSON function spec")->required();
  eval->add_option("--scenario", scenario, "Scenario JSON file");
  eval->add_option("--region", region, "Region file, one region per line")->required();

  auto* var = app.add_subcommand("variations", "Positive, negative and total variations on each region");
  var->add_option("--fn", fn, "Function name from the scenario, or a JSON function spec")->required();
  var->add_option("--scenario", scenario, "Scenario JSON file");
  var->add_option("--region", region, "Region file, one region per line")->required();
  var->add_option("--oracle", oracle, "search (default), grouped or naive")
      ->check(CLI::IsMember({"search", "grouped", "naive"}));

  auto* dec = app.add_subcommand("decompose", "Split a signed topological measure into two topological measures");
  dec->add_option("--scenario", scenario, "Scenario JSON file")->required();
  dec->add_option("--fn", fn, "Function to decompose")->required();
  dec->add_option("--point", point, "Base point x,y")->required();

  auto* wit = app.add_subcommand("witness", "Replay every witness in a suite report");
  wit->add_option("report", report_in, "Suite report JSON")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(scenario, suite, fn, g);
    if (*eval) return cmd_eval(fn, scenario, region, g);
    if (*var) return cmd_variations(fn, scenario, region, oracle, g);
    if (*dec) return cmd_decompose(scenario, fn, point, g);
    if (*wit) return cmd_witness(report_in, g);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::ParseError ? 3 : 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
