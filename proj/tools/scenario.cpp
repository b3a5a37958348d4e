#include "scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qmlab/error.hpp"
#include "qmlab/solid_extension.hpp"

namespace qmlab::cli {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, "at " + (where.empty() ? std::string("/") : where) + ": " + what);
}

void allow_keys(const json& obj, const std::set<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!keys.count(k)) parse_fail(where, "unknown field '" + k + "'");
  }
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) parse_fail(where, "missing field '" + key + "'");
  return obj.at(key);
}

std::int64_t int_field(const json& v, const std::string& where) {
  if (!v.is_number_integer()) parse_fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

BoundingBox box_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) parse_fail(where, "expected [x0, y0, x1, y1]");
  BoundingBox b{int_field(v[0], where + "/0"), int_field(v[1], where + "/1"), int_field(v[2], where + "/2"),
                int_field(v[3], where + "/3")};
  if (b.x1 < b.x0 || b.y1 < b.y0) parse_fail(where, "box corners out of order");
  return b;
}

// Translates library errors raised while building into located parse errors.
template <class Fn>
auto located(const std::string& where, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::UnknownFunction) throw;
    throw Error(e.code(), "at " + where + ": " + e.message());
  }
}

const std::set<std::string> kThreePoints{"fn", "p1", "p2", "p3"};

}  // namespace

Rational parse_rational_json(const json& v, const std::string& where) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
      if (v[1].get<std::int64_t>() == 0) parse_fail(where, "zero denominator");
      return Rational(v[0].get<std::int64_t>(), v[1].get<std::int64_t>());
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError && e.message().find("at /") == std::string::npos) {
      parse_fail(where, e.message());
    }
    throw;
  }
  parse_fail(where, "expected a rational as \"p/q\", an integer or [num, den]");
}

Point parse_point_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) parse_fail(where, "expected a point [x, y]");
  return {parse_rational_json(v[0], where + "/0"), parse_rational_json(v[1], where + "/1")};
}

Point parse_point_text(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "point '" + text + "' is not of the form x,y");
  return {parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
}

SetFunction build_function(const json& spec, const std::map<std::string, SetFunction>& known,
                           const VariationOptions& vopts, const std::string& where) {
  if (!spec.is_object()) parse_fail(where, "expected a function object");
  if (spec.contains("ref")) {
    allow_keys(spec, {"ref"}, where);
    const json& r = spec.at("ref");
    if (!r.is_string()) parse_fail(where + "/ref", "expected a name");
    const auto it = known.find(r.get<std::string>());
    if (it == known.end()) {
      throw Error(ErrorCode::UnknownFunction, "at " + where + ": no function named '" + r.get<std::string>() + "'");
    }
    return it->second;
  }
  const json& fn = field(spec, "fn", where);
  if (!fn.is_string()) parse_fail(where + "/fn", "expected a string");
  const std::string name = fn.get<std::string>();
  auto point = [&](const char* key) { return parse_point_json(field(spec, key, where), where + "/" + key); };
  auto sub = [&](const char* key) { return build_function(field(spec, key, where), known, vopts, where + "/" + key); };
  return located(where, [&]() -> SetFunction {
    if (name == "delta") {
      allow_keys(spec, {"fn", "p", "w"}, where);
      const Rational w = spec.contains("w") ? parse_rational_json(spec.at("w"), where + "/w") : Rational(1);
      return point_mass(point("p"), w);
    }
    if (name == "area") {
      allow_keys(spec, {"fn", "window"}, where);
      return windowed_area(box_json(field(spec, "window", where), where + "/window"));
    }
    if (name == "unbounded_area") {
      allow_keys(spec, {"fn"}, where);
      return unbounded_area();
    }
    if (name == "zero") {
      allow_keys(spec, {"fn"}, where);
      return zero_function();
    }
    if (name == "maj3" || name == "linked_pair" || name == "naive_majority") {
      allow_keys(spec, kThreePoints, where);
      const Point a = point("p1"), b = point("p2"), c = point("p3");
      if (name == "maj3") return maj3(a, b, c);
      if (name == "linked_pair") return linked_pair(a, b, c);
      return naive_majority(a, b, c);
    }
    if (name == "lincomb") {
      allow_keys(spec, {"fn", "coeffs", "parts"}, where);
      const json& cs = field(spec, "coeffs", where);
      const json& ps = field(spec, "parts", where);
      if (!cs.is_array() || !ps.is_array() || cs.size() != ps.size() || cs.empty()) {
        parse_fail(where, "coeffs and parts must be nonempty arrays of equal length");
      }
      std::vector<Rational> coeffs;
      std::vector<SetFunction> parts;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        coeffs.push_back(parse_rational_json(cs[i], where + "/coeffs/" + std::to_string(i)));
        parts.push_back(build_function(ps[i], known, vopts, where + "/parts/" + std::to_string(i)));
      }
      return linear_combination(coeffs, parts);
    }
    if (name == "plus" || name == "minus" || name == "total") {
      allow_keys(spec, {"fn", "of"}, where);
      const VariationFunctions vf = variation_functions(sub("of"), vopts);
      return name == "plus" ? vf.plus : name == "minus" ? vf.minus : vf.total;
    }
    if (name == "nu1" || name == "nu2") {
      allow_keys(spec, {"fn", "of", "p"}, where);
      const Decomposition d = decompose_stm(sub("of"), point("p"), vopts);
      return name == "nu1" ? d.nu1 : d.nu2;
    }
    if (name == "solid_round_trip") {
      allow_keys(spec, {"fn", "of", "p"}, where);
      return extend_solid(restrict_to_solid(sub("of"), point("p")));
    }
    throw Error(ErrorCode::UnknownFunction, "at " + where + "/fn: no gallery function '" + name + "'");
  });
}

Scenario parse_scenario(const json& doc) {
  allow_keys(doc, {"functions", "probe", "variation", "suites", "output", "max_witnesses"}, "");
  Scenario s;
  if (doc.contains("variation")) {
    const json& v = doc.at("variation");
    allow_keys(v, {"level_cap", "dilation_depth", "budget"}, "/variation");
    VariationOptions& o = s.check.variation;
    if (v.contains("level_cap")) o.level_cap = static_cast<int>(int_field(v.at("level_cap"), "/variation/level_cap"));
    if (v.contains("dilation_depth")) {
      o.dilation_depth = static_cast<int>(int_field(v.at("dilation_depth"), "/variation/dilation_depth"));
    }
    if (v.contains("budget")) o.budget = static_cast<int>(int_field(v.at("budget"), "/variation/budget"));
  }
  if (doc.contains("max_witnesses")) {
    s.check.max_witnesses = static_cast<std::size_t>(int_field(doc.at("max_witnesses"), "/max_witnesses"));
  }
  if (doc.contains("probe")) {
    const json& p = doc.at("probe");
    const std::string w = "/probe";
    allow_keys(p,
               {"window", "exhaustive_level", "random_count", "random_window", "random_level", "seed",
                "refinement_depth", "max_chain_level", "pair_limit", "chain_count", "structured", "extra"},
               w);
    ProbeOptions& o = s.probe;
    auto as_int = [&](const char* k) { return static_cast<int>(int_field(p.at(k), w + "/" + k)); };
    if (p.contains("window")) o.window = box_json(p.at("window"), w + "/window");
    if (p.contains("random_window")) o.random_window = box_json(p.at("random_window"), w + "/random_window");
    if (p.contains("exhaustive_level")) o.exhaustive_level = as_int("exhaustive_level");
    if (p.contains("random_count")) o.random_count = as_int("random_count");
    if (p.contains("random_level")) o.random_level = as_int("random_level");
    if (p.contains("refinement_depth")) o.refinement_depth = as_int("refinement_depth");
    if (p.contains("max_chain_level")) o.max_chain_level = as_int("max_chain_level");
    if (p.contains("chain_count")) o.chain_count = as_int("chain_count");
    if (p.contains("seed")) o.seed = static_cast<std::uint64_t>(int_field(p.at("seed"), w + "/seed"));
    if (p.contains("pair_limit")) o.pair_limit = static_cast<std::size_t>(int_field(p.at("pair_limit"), w + "/pair_limit"));
    if (p.contains("structured")) {
      if (!p.at("structured").is_boolean()) parse_fail(w + "/structured", "expected true or false");
      o.structured = p.at("structured").get<bool>();
    }
    if (p.contains("extra")) {
      const json& e = p.at("extra");
      if (!e.is_array()) parse_fail(w + "/extra", "expected an array of region lines");
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string at = w + "/extra/" + std::to_string(i);
        if (!e[i].is_string()) parse_fail(at, "expected a region line");
        o.extra.push_back(located(at, [&] { return parse_region(e[i].get<std::string>()); }));
      }
    }
  }
  if (doc.contains("functions")) {
    const json& fs = doc.at("functions");
    if (!fs.is_object()) parse_fail("/functions", "expected an object of named functions");
    for (const auto& [name, spec] : fs.items()) s.specs[name] = spec;
    // References may point at any other entry; build in dependency order.
    std::set<std::string> visiting;
    auto build = [&](auto&& self, const std::string& name) -> void {
      if (s.functions.count(name)) return;
      if (!visiting.insert(name).second) parse_fail("/functions/" + name, "cyclic reference");
      std::vector<std::string> refs;
      auto collect = [&](auto&& rec, const json& j) -> void {
        if (j.is_object()) {
          if (j.contains("ref") && j.at("ref").is_string()) refs.push_back(j.at("ref").get<std::string>());
          for (const auto& [k, v] : j.items()) rec(rec, v);
        } else if (j.is_array()) {
          for (const json& v : j) rec(rec, v);
        }
      };
      collect(collect, s.specs.at(name));
      for (const std::string& r : refs) {
        if (s.specs.count(r)) self(self, r);
      }
      s.functions.emplace(name, build_function(s.specs.at(name), s.functions, s.check.variation, "/functions/" + name));
      visiting.erase(name);
    };
    for (const auto& [name, spec] : s.specs) build(build, name);
  }
  if (doc.contains("suites")) {
    const json& ss = doc.at("suites");
    if (!ss.is_array()) parse_fail("/suites", "expected an array");
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const std::string w = "/suites/" + std::to_string(i);
      allow_keys(ss[i], {"fn", "suite", "expect", "eps", "candidates"}, w);
      SuiteRequest r;
      r.where = w;
      const json& fn = field(ss[i], "fn", w);
      const json& suite = field(ss[i], "suite", w);
      if (!fn.is_string() || !suite.is_string()) parse_fail(w, "fn and suite must be strings");
      r.fn = fn.get<std::string>();
      r.suite = suite.get<std::string>();
      if (!s.functions.count(r.fn)) throw Error(ErrorCode::UnknownFunction, "at " + w + "/fn: no function named '" + r.fn + "'");
      static const std::set<std::string> suites{"dtm", "tm", "sdtm", "stm", "classify", "jordan", "norms",
                                                "tau_smooth", "regularity", "small_sets", "solid_limits",
                                                "additivity_equivalence", "modularity", "variation_dtm"};
      if (!suites.count(r.suite)) parse_fail(w + "/suite", "unknown suite '" + r.suite + "'");
      if (ss[i].contains("expect")) {
        if (!ss[i].at("expect").is_string()) parse_fail(w + "/expect", "expected a class name");
        r.expect = ss[i].at("expect").get<std::string>();
      }
      if (ss[i].contains("eps")) r.eps = parse_rational_json(ss[i].at("eps"), w + "/eps");
      if (ss[i].contains("candidates")) {
        const json& cs = ss[i].at("candidates");
        if (!cs.is_array()) parse_fail(w + "/candidates", "expected an array of names");
        for (std::size_t k = 0; k < cs.size(); ++k) {
          const std::string at = w + "/candidates/" + std::to_string(k);
          if (!cs[k].is_string() || !s.functions.count(cs[k].get<std::string>())) {
            throw Error(ErrorCode::UnknownFunction, "at " + at + ": not a function name");
          }
          r.candidates.push_back(cs[k].get<std::string>());
        }
      }
      s.suites.push_back(std::move(r));
    }
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) parse_fail("/output", "expected a directory path");
    s.output = doc.at("output").get<std::string>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read scenario '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  try {
    return parse_scenario(doc);
  } catch (const Error& e) {
    throw Error(e.code(), path + " " + e.message());
  }
}

std::vector<Point> scenario_atoms(const Scenario& s) {
  std::vector<Point> out;
  for (const auto& [name, f] : s.functions) {
    for (const Point& p : f.atoms()) {
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
  }
  return out;
}

json to_json(const Witness& w) {
  json j;
  j["relation"] = w.relation;
  j["regions"] = json::array();
  for (const GridRegion& r : w.regions) j["regions"].push_back(format_region(r));
  j["values"] = json::array();
  for (const ExtendedValue& v : w.values) j["values"].push_back(to_string(v));
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

json to_json(const CheckReport& r) {
  json j;
  j["check"] = r.check;
  j["verdict"] = std::string(to_string(r.verdict));
  if (!r.detail.empty()) j["detail"] = r.detail;
  j["witnesses"] = json::array();
  for (const Witness& w : r.witnesses) j["witnesses"].push_back(to_json(w));
  j["stats"] = {{"probes", r.stats.probes}, {"depth", r.stats.depth}, {"inconclusive", r.stats.inconclusive}};
  if (!r.parts.empty()) {
    j["parts"] = json::array();
    for (const CheckReport& p : r.parts) j["parts"].push_back(to_json(p));
  }
  return j;
}

Witness witness_from_json(const json& j) {
  allow_keys(j, {"relation", "regions", "values", "note"}, "/witness");
  Witness w;
  w.relation = field(j, "relation", "/witness").get<std::string>();
  for (const json& r : field(j, "regions", "/witness")) w.regions.push_back(parse_region(r.get<std::string>()));
  for (const json& v : field(j, "values", "/witness")) w.values.push_back(parse_extended(v.get<std::string>()));
  if (j.contains("note")) w.note = j.at("note").get<std::string>();
  return w;
}

std::vector<CheckReport> run_request(const Scenario& s, const SuiteRequest& req, const ProbeFamily& probes) {
  const SetFunction& f = s.functions.at(req.fn);
  const CheckOptions& o = s.check;
  const std::string& q = req.suite;
  if (q == "dtm" || q == "tm" || q == "sdtm" || q == "stm") return run_suite(q, f, probes, o);
  if (q == "classify") {
    CheckReport r = classify(f, probes, o);
    if (!req.expect.empty() && r.detail != req.expect) {
      r.verdict = Verdict::Fail;
      r.detail += " (expected " + req.expect + ")";
    }
    return {r};
  }
  if (q == "jordan") return {jordan_check(f, probes, o)};
  if (q == "norms") return {check_norms(f, probes, o)};
  if (q == "tau_smooth") return {check_tau_smooth(f, probes, o)};
  if (q == "regularity") return {check_regularity(f, probes, o)};
  if (q == "small_sets") return {check_small_sets(f, probes, req.eps, o)};
  if (q == "solid_limits") return {check_solid_limits(f, probes, o)};
  if (q == "additivity_equivalence") return {check_additivity_equivalence(f, probes, o)};
  if (q == "modularity") return {check_modularity(f, probes, o)};
  std::vector<SetFunction> candidates;
  for (const std::string& c : req.candidates) candidates.push_back(s.functions.at(c));
  return {variation_is_dtm_check(f, probes, candidates, o)};
}

}  // namespace qmlab::cli
