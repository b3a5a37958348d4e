// Acceptance run: one PASS/FAIL line per criterion. Arguments select criteria by number.

#include <bitset>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "qmlab/checkers.hpp"
#include "qmlab/error.hpp"
#include "qmlab/solid_extension.hpp"
#include "scenario.hpp"
#include "support/sampling_oracle.hpp"

namespace qmlab {
namespace {

using testing::SampleLattice;

const Point p1{Rational(1, 3), Rational(1, 3)};
const Point p2{Rational(7, 3), Rational(1, 3)};
const Point p3{Rational(4, 3), Rational(7, 3)};
const std::vector<Point> atoms{p1, p2, p3};

SetFunction mu() { return linear_combination({Rational(1), Rational(-1, 2)}, {maj3(p1, p2, p3), point_mass(p1)}); }
SetFunction delta_diff() { return linear_combination({Rational(1), Rational(-1)}, {point_mass(p1), point_mass(p2)}); }
SetFunction signed_pair() {
  return linear_combination({Rational(1), Rational(-1, 2)}, {point_mass(p1), point_mass(p2)});
}
SetFunction lambda() {
  return linear_combination({Rational(1), Rational(-1, 2)}, {linked_pair(p1, p2, p3), maj3(p1, p2, p3)});
}

std::vector<SetFunction> gallery() {
  return {point_mass(p1), windowed_area({0, 0, 3, 3}), maj3(p1, p2, p3), linked_pair(p1, p2, p3),
          mu(),           delta_diff(),                signed_pair(),    lambda()};
}

ProbeOptions standard_probes() {
  ProbeOptions o;
  o.window = {0, 0, 3, 3};
  o.exhaustive_level = 0;
  return o;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

// ---------------------------------------------------------------------------------------------

using Bits = std::bitset<1024>;

Bits to_bits(const std::vector<bool>& v) {
  Bits b;
  for (std::size_t k = 0; k < v.size(); ++k) b[k] = v[k];
  return b;
}

Outcome region_algebra() {
  const auto t0 = Clock::now();
  const SampleLattice lat({0, 0, 3, 3}, 1, 2);
  if (lat.size() > 1024) return {false, "lattice too large"};
  Bits all;
  for (std::size_t k = 0; k < lat.size(); ++k) all[k] = true;
  std::vector<GridRegion> regions;
  for (const CellSet& s : testing::all_subsets(0, 0, 0, 3, 3)) {
    regions.push_back(GridRegion::open(s));
    regions.push_back(GridRegion::closed(s));
  }
  // A point set is a grid region when it equals U(T) or K(T) for T = the cells whose centres
  // it holds (resolution 2 puts a lattice point at each level-0 centre).
  std::vector<std::pair<std::size_t, Cell>> centres;
  for (const Cell& c : CellSet::box(0, {-1, -1, 4, 4}).members()) {
    if (const auto k = lat.index(4 * c.x + 2, 4 * c.y + 2)) centres.emplace_back(*k, c);
  }
  auto representable = [&](const Bits& u) {
    std::vector<Cell> t;
    for (const auto& [k, c] : centres) {
      if (u[k]) t.push_back(c);
    }
    const CellSet cells(0, t);
    return to_bits(lat.sample(GridRegion::open(cells))) == u || to_bits(lat.sample(GridRegion::closed(cells))) == u;
  };
  std::vector<Bits> samples;
  std::size_t bad = 0, checks = 0;
  for (const GridRegion& r : regions) {
    samples.push_back(to_bits(lat.sample(r)));
    ++checks;
    if (to_bits(lat.sample(complement(r))) != (~samples.back() & all)) ++bad;
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = 0; j < regions.size(); ++j) {
      const Bits &a = samples[i], &b = samples[j];
      checks += 3;
      if (subset(regions[i], regions[j]) != (a & ~b).none()) ++bad;
      const bool apart = (a & b).none();
      if (disjoint(regions[i], regions[j]) != apart) ++bad;
      if (!apart) continue;
      const Bits u = a | b;
      const std::optional<GridRegion> got = disjoint_union(regions[i], regions[j]);
      if (got.has_value() != representable(u) || (got && to_bits(lat.sample(*got)) != u)) ++bad;
    }
  }
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << regions.size() << " regions, " << checks << " decisions, " << bad << " discrepancies, " << fmt(s);
  return {bad == 0 && s < 60, d.str()};
}

// ---------------------------------------------------------------------------------------------

// Samples at the finer of the two levels plus one, over a window with room for the results.
SampleLattice lattice_at(int level) { return SampleLattice({-1, -1, 5, 5}, 1, level + 1); }

std::vector<bool> closure_of(const SampleLattice& lat, const std::vector<bool>& s) {
  std::vector<bool> out(s.size());
  for (std::int64_t j = 0; j < lat.ny(); ++j) {
    for (std::int64_t i = 0; i < lat.nx(); ++i) {
      bool hit = false;
      for (int dj = -1; dj <= 1 && !hit; ++dj) {
        for (int di = -1; di <= 1 && !hit; ++di) {
          const std::int64_t a = i + di, b = j + dj;
          if (a >= 0 && b >= 0 && a < lat.nx() && b < lat.ny()) hit = s[static_cast<std::size_t>(b * lat.nx() + a)];
        }
      }
      out[static_cast<std::size_t>(j * lat.nx() + i)] = hit;
    }
  }
  return out;
}

CellSet random_cells(std::mt19937_64& rng, int level, const BoundingBox& box, int n) {
  const std::int64_t side = std::int64_t{1} << level;
  std::uniform_int_distribution<std::int64_t> x(box.x0 * side, box.x1 * side - 1), y(box.y0 * side, box.y1 * side - 1);
  std::vector<Cell> c;
  for (int k = 0; k < n; ++k) c.push_back({x(rng), y(rng)});
  return CellSet(level, std::move(c));
}

Outcome constructive_lemmas() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> level_d(0, 1), count(2, 10);
  int split_ok = 0, split_runs = 0, cover_violations = 0, split_bad = 0;
  while (split_runs < 500) {
    const int l = level_d(rng);
    const GridRegion u = GridRegion::open(random_cells(rng, l, {0, 0, 4, 4}, count(rng) + 4));
    const GridRegion v = GridRegion::open(random_cells(rng, l, {0, 0, 4, 4}, count(rng) + 4));
    const CellSet pool = erode(unite(u.cells(), v.cells()).at_level(l + 1));
    if (pool.is_empty()) continue;
    std::vector<Cell> pick;
    for (const Cell& c : pool.members()) {
      if (rng() % 2) pick.push_back(c);
    }
    const GridRegion c = GridRegion::closed(CellSet(l + 1, pick));
    const SampleLattice base = lattice_at(l + 1);
    const auto sc = base.sample(c), su = base.sample(u), sv = base.sample(v);
    bool covered = true;
    for (std::size_t k = 0; k < sc.size(); ++k) covered = covered && (!sc[k] || su[k] || sv[k]);
    try {
      const auto [kk, dd] = halmos_split(c, u, v);
      if (!covered) {
        ++split_bad;
        continue;
      }
      ++split_runs;
      const SampleLattice lat = lattice_at(std::max({kk.level(), dd.level(), c.level()}));
      const auto sk = lat.sample(kk), sd = lat.sample(dd), sc2 = lat.sample(c), su2 = lat.sample(u),
                 sv2 = lat.sample(v);
      bool ok = kk.is_compact() && dd.is_compact() && lat.looks_closed(sk) && lat.looks_closed(sd);
      for (std::size_t k = 0; k < sk.size(); ++k) {
        ok = ok && ((sk[k] || sd[k]) == sc2[k]) && (!sk[k] || su2[k]) && (!sd[k] || sv2[k]);
      }
      split_ok += ok ? 1 : 0;
    } catch (const Error& e) {
      if (covered) {
        ++split_runs;
        ++split_bad;
      } else if (e.code() == ErrorCode::CoverViolation) {
        ++cover_violations;
      } else {
        ++split_bad;
      }
    }
  }
  int interp_ok = 0;
  for (int run = 0; run < 500; ++run) {
    const int l = level_d(rng);
    const GridRegion k = GridRegion::closed(random_cells(rng, l, {0, 0, 4, 4}, count(rng) / 2));
    const GridRegion u = GridRegion::open(unite(dilate(k.cells()), random_cells(rng, l, {0, 0, 4, 4}, count(rng))));
    const GridRegion v = interpolate(k, u);
    const SampleLattice lat = lattice_at(std::max(v.level(), l));
    const auto sk = lat.sample(k), sv = lat.sample(v), su = lat.sample(u);
    const auto cv = closure_of(lat, sv);
    bool ok = v.kind() == Kind::Open || v.is_empty();
    ok = ok && v.is_bounded() && lat.looks_open(sv);
    for (std::size_t i = 0; i < sk.size(); ++i) ok = ok && (!sk[i] || sv[i]) && (!cv[i] || su[i]);
    interp_ok += ok ? 1 : 0;
  }
  std::ostringstream d;
  d << "halmos_split " << split_ok << "/500 (" << cover_violations << " uncovered inputs rejected, " << split_bad
    << " wrong outcomes), interpolate " << interp_ok << "/500, " << fmt(seconds_since(t0));
  return {split_ok == 500 && split_bad == 0 && interp_ok == 500, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome maj3_is_tm() {
  const auto t0 = Clock::now();
  ProbeOptions o = standard_probes();
  o.random_count = 2000;
  o.random_window = {-1, -1, 5, 5};
  o.random_level = 1;
  o.seed = 3;
  const ProbeFamily probes(o, atoms);
  const SetFunction f = maj3(p1, p2, p3);
  const Verdict tm = combine(run_suite("tm", f, probes));
  const CheckReport c = classify(f, probes);
  bool found = false;
  for (const CheckReport& part : c.parts) {
    for (const Witness& w : part.witnesses) {
      if (w.relation != "modular" || w.values.size() != 4) continue;
      found = found || (w.values[0] == ExtendedValue(0) && w.values[1] == ExtendedValue(0) &&
                        w.values[2] == ExtendedValue(1) && replay(f, w));
    }
  }
  std::ostringstream d;
  d << probes.regions().size() << " probes, TM suite " << to_string(tm) << ", classify " << c.detail
    << ", subadditivity witness " << (found ? "0 + 0 < 1" : "missing") << ", " << fmt(seconds_since(t0));
  return {tm == Verdict::Pass && c.detail == "TM" && found, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome jordan() {
  CheckOptions co;
  co.variation.level_cap = 3;
  const ProbeFamily probes(standard_probes(), atoms);
  bool pass = true;
  std::ostringstream d;
  const std::pair<const char*, SetFunction> fs[] = {{"maj3 - 1/2 delta_p1", mu()}, {"delta_a - delta_b", delta_diff()}};
  for (const auto& [name, f] : fs) {
    const auto t0 = Clock::now();
    const CheckReport r = jordan_check(f, probes, co);
    const double s = seconds_since(t0);
    pass = pass && r.verdict == Verdict::Pass && s < 300;
    d << name << ": " << to_string(r.verdict) << " (" << r.detail << ", " << fmt(s) << "); ";
  }
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome lobes() {
  VariationOptions o;
  o.level_cap = 3;
  const SetFunction f = mu();
  const GridRegion u = GridRegion::open(CellSet(0, {{0, 0}, {1, 0}}));
  const GridRegion v = GridRegion::open(CellSet(0, {{1, 0}, {2, 0}}));
  const GridRegion uv = GridRegion::open(CellSet(0, {{0, 0}, {1, 0}, {2, 0}}));
  const VariationResult ru = variation_plus(f, u, o), rv = variation_plus(f, v, o), ruv = variation_plus(f, uv, o);
  std::ostringstream d;
  d << "mu+(U) = " << to_string(ru.value) << ", mu+(V) = " << to_string(rv.value) << ", mu+(U u V) = "
    << to_string(ruv.value) << (ru.stabilized && rv.stabilized && ruv.stabilized ? " (settled)" : " (unsettled)");
  return {ru.value == ExtendedValue(0) && rv.value == ExtendedValue(0) && ruv.value >= ExtendedValue(Rational(1, 2)),
          d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome norm_equivalence() {
  const auto t0 = Clock::now();
  const ProbeFamily probes(standard_probes(), atoms);
  CheckOptions co;
  co.variation.level_cap = 3;
  bool pass = true;
  std::ostringstream d;
  for (const SetFunction& f : gallery()) {
    const CheckReport r = check_norms(f, probes, co);
    pass = pass && r.verdict == Verdict::Pass;
    if (r.verdict != Verdict::Pass) d << f.name() << " " << to_string(r.verdict) << " " << r.detail << "; ";
  }
  d << gallery().size() << " functions, " << fmt(seconds_since(t0));
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome tau_smoothness() {
  const auto t0 = Clock::now();
  ProbeOptions o = standard_probes();
  o.chain_count = 200;
  const ProbeFamily probes(o, atoms);
  bool pass = true;
  int depth = 0;
  std::size_t chains = std::numeric_limits<std::size_t>::max();
  std::ostringstream d;
  for (const SetFunction& f : gallery()) {
    const CheckReport r = check_tau_smooth(f, probes);
    pass = pass && r.verdict == Verdict::Pass && r.stats.depth <= 4;
    depth = std::max(depth, r.stats.depth);
    chains = std::min(chains, r.stats.probes);
    if (r.verdict != Verdict::Pass) d << f.name() << " " << to_string(r.verdict) << "; ";
  }
  pass = pass && chains >= 200;
  d << "min " << chains << " chains per function, max stabilization depth " << depth << ", "
    << fmt(seconds_since(t0));
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome strict_inclusions() {
  const auto t0 = Clock::now();
  const cli::Scenario s = cli::load_scenario(QMLAB_SOURCE_DIR "/scenarios/inclusions.json");
  const ProbeFamily probes(s.probe, cli::scenario_atoms(s));
  struct Member {
    const char* fn;
    const char* cls;
    const char* excluded_by;
  };
  const Member members[] = {{"signed", "SM", "nonnegative"}, {"mu", "STM", "modularity"}, {"lambda", "SDTM", "tm1"}};
  bool pass = true;
  std::ostringstream d;
  for (const Member& m : members) {
    const SetFunction& f = s.functions.at(m.fn);
    const CheckReport c = classify(f, probes, s.check);
    bool witnessed = false;
    for (const CheckReport& part : c.parts) {
      if (part.check != m.excluded_by || part.verdict != Verdict::Fail) continue;
      for (const Witness& w : part.witnesses) witnessed = witnessed || replay(f, w, s.check);
    }
    pass = pass && c.detail == m.cls && witnessed;
    d << m.fn << " " << c.detail << " (" << m.excluded_by << " witness " << (witnessed ? "replayed" : "missing")
      << "); ";
  }
  d << fmt(seconds_since(t0));
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome two_tm_decomposition() {
  const auto t0 = Clock::now();
  CheckOptions co;
  co.variation.level_cap = 3;
  // The parts are built from variations, which are only trusted on opens at least one level
  // coarser than the cap; limit chains stop there.
  ProbeOptions po = standard_probes();
  po.max_chain_level = co.variation.level_cap - 1;
  const ProbeFamily probes(po, atoms);
  const SetFunction f = mu();
  const VariationFunctions vf = variation_functions(f, co.variation);
  const Point bases[] = {{Rational(5, 3), Rational(5, 3)}, {Rational(-2, 3), Rational(10, 3)}};
  std::vector<Decomposition> ds;
  bool pass = true;
  std::ostringstream d;
  for (const Point& p : bases) {
    ds.push_back(decompose_stm(f, vf, p, probes.regions()));
    const Decomposition& dec = ds.back();
    const Verdict v1 = combine(run_suite("tm", dec.nu1, probes, co));
    const Verdict v2 = combine(run_suite("tm", dec.nu2, probes, co));
    const SetFunction diff = linear_combination({Rational(1), Rational(-1)}, {dec.nu1, dec.nu2});
    const CheckReport agree = check_agreement(diff, f, probes, co);
    pass = pass && v1 == Verdict::Pass && v2 == Verdict::Pass && agree.verdict == Verdict::Pass;
    d << "p=" << to_string(p) << ": nu1 " << to_string(v1) << ", nu2 " << to_string(v2) << ", nu1-nu2=mu "
      << to_string(agree.verdict) << " (" << dec.unstable.size() << " unsettled); ";
  }
  std::size_t differ = 0;
  for (const GridRegion& r : probes.regions()) {
    if (ds[0].nu1(r) != ds[1].nu1(r) || ds[0].nu2(r) != ds[1].nu2(r)) ++differ;
  }
  pass = pass && differ > 0;
  d << "decompositions differ on " << differ << " of " << probes.regions().size() << " probes; "
    << fmt(seconds_since(t0));
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome oracle_cross_validation() {
  const auto t0 = Clock::now();
  const std::vector<SetFunction> fs{maj3(p1, p2, p3), mu(), lambda()};
  std::size_t compared = 0, bad = 0;
  for (const SetFunction& f : fs) {
    for (const CellSet& t : testing::all_subsets(0, 0, 0, 3, 3)) {
      // The open U(T) of the window; its cells are the pool of at most nine cells.
      ++compared;
      if (grouped_total_variation(f, t) != naive_total_variation(f, t)) ++bad;
    }
  }
  std::ostringstream d;
  d << compared << " opens over " << fs.size() << " functions, " << bad << " discrepancies, "
    << fmt(seconds_since(t0));
  return {bad == 0, d.str()};
}

// ---------------------------------------------------------------------------------------------

Outcome round_trip() {
  const auto t0 = Clock::now();
  ProbeOptions o = standard_probes();
  o.random_count = 500;
  o.random_window = {-1, -1, 5, 5};
  o.random_level = 1;
  const ProbeFamily probes(o, atoms);
  const std::vector<SetFunction> fs{point_mass({Rational(4, 3), Rational(1, 3)}), maj3(p1, p2, p3)};
  const Point bases[] = {p1, {Rational(-5, 3), Rational(10, 3)}};
  std::size_t checked = 0, bad = 0;
  for (const SetFunction& f : fs) {
    for (const Point& p : bases) {
      const SetFunction g = extend_solid(restrict_to_solid(f, p));
      for (const GridRegion& r : probes.regions()) {
        ++checked;
        if (g(r) != f(r)) ++bad;
      }
    }
  }
  std::ostringstream d;
  d << checked << " evaluations, " << bad << " mismatches, " << fmt(seconds_since(t0));
  return {bad == 0, d.str()};
}

}  // namespace
}  // namespace qmlab

int main(int argc, char** argv) {
  using namespace qmlab;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"region algebra agrees with point sampling", region_algebra},
      {"constructive lemmas", constructive_lemmas},
      {"maj3 is a topological measure and not a measure", maj3_is_tm},
      {"Jordan identities on settled probes", jordan},
      {"positive variation on the lobes", lobes},
      {"norm equivalence", norm_equivalence},
      {"tau-smoothness", tau_smoothness},
      {"strict inclusions", strict_inclusions},
      {"decomposition into two topological measures", two_tm_decomposition},
      {"total-variation oracles agree", oracle_cross_validation},
      {"solid restriction round trip", round_trip},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  int failed = 0;
  for (int k = 0; k < 11; ++k) {
    if (!only.empty() && !only.count(k + 1)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << (k + 1) << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
