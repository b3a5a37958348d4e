#pragma once

// Scenario files: named gallery functions, probe parameters and the suites to run, plus the JSON
// form of check reports.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmlab/checkers.hpp"

namespace qmlab::cli {

using nlohmann::json;

struct SuiteRequest {
  std::string fn;
  std::string suite;
  /// classify only: the class that must be emitted.
  std::string expect;
  /// small_sets only.
  Rational eps{1, 4};
  /// variation_dtm only: names of candidate dominating functions.
  std::vector<std::string> candidates;
  /// Location in the scenario file, for messages.
  std::string where;
};

struct Scenario {
  /// Function specs as written, keyed by name; `functions` holds the built evaluators.
  std::map<std::string, json> specs;
  std::map<std::string, SetFunction> functions;
  ProbeOptions probe;
  CheckOptions check;
  std::vector<SuiteRequest> suites;
  std::string output;
};

/// Builds a gallery function from its spec; `{"ref": name}` looks up `known`.
/// Throws ParseError / UnknownFunction naming `where` (a JSON pointer).
SetFunction build_function(const json& spec, const std::map<std::string, SetFunction>& known,
                           const VariationOptions& vopts, const std::string& where);
/// Rationals are "p/q" strings, integers or [num, den] pairs.
Rational parse_rational_json(const json& v, const std::string& where);
Point parse_point_json(const json& v, const std::string& where);
/// "x,y" with rational coordinates.
Point parse_point_text(const std::string& text);

/// Validates and builds a scenario. Unknown fields are rejected.
Scenario parse_scenario(const json& doc);
Scenario load_scenario(const std::string& path);

/// Atoms of every function in the scenario, for structured probes.
std::vector<Point> scenario_atoms(const Scenario& s);

json to_json(const Witness& w);
json to_json(const CheckReport& r);
Witness witness_from_json(const json& j);

/// Runs one suite request. Classify with `expect` fails when another class is emitted.
std::vector<CheckReport> run_request(const Scenario& s, const SuiteRequest& req, const ProbeFamily& probes);

}  // namespace qmlab::cli
