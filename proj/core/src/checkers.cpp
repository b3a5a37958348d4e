#include "qmlab/checkers.hpp"

#include <algorithm>
#include <optional>
#include <random>

#include "qmlab/error.hpp"
#include "qmlab/solid_extension.hpp"

namespace qmlab {

namespace {

class Recorder {
 public:
  Recorder(std::string name, const CheckOptions& opts) : max_(opts.max_witnesses) { report_.check = std::move(name); }

  void tested(std::size_t n = 1) { report_.stats.probes += n; }
  void fail(Witness w) {
    ++failures_;
    if (report_.witnesses.size() < max_) report_.witnesses.push_back(std::move(w));
  }
  void unsettled(const GridRegion* where = nullptr) {
    if (where && report_.stats.inconclusive == 0) first_unsettled_ = format_region(*where);
    ++report_.stats.inconclusive;
  }
  void depth(int d) { report_.stats.depth = std::max(report_.stats.depth, d); }
  CheckReport& report() { return report_; }

  CheckReport finish() {
    if (failures_ > 0) {
      report_.verdict = Verdict::Fail;
      report_.detail = std::to_string(failures_) + " violation(s)";
    } else if (report_.stats.inconclusive > 0) {
      report_.verdict = Verdict::Inconclusive;
      std::string note = std::to_string(report_.stats.inconclusive) + " unsettled";
      if (!first_unsettled_.empty()) note += ", first on " + first_unsettled_;
      report_.detail = report_.detail.empty() ? note : report_.detail + "; " + note;
    }
    return std::move(report_);
  }

 private:
  CheckReport report_;
  std::size_t max_;
  std::size_t failures_ = 0;
  std::string first_unsettled_;
};

// Calls fn(i, j) for all pairs (i < j when `same`), or for `limit` seeded random pairs when
// there are more.
template <class Fn>
void for_pairs(std::size_t n, std::size_t m, bool same, std::size_t limit, std::uint64_t seed, Fn fn) {
  const std::size_t total = same ? n * (n - (n > 0)) / 2 : n * m;
  if (total <= limit) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = same ? i + 1 : 0; j < (same ? n : m); ++j) fn(i, j);
    }
    return;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < limit; ++k) {
    std::size_t i = rng() % n, j = rng() % (same ? n : m);
    if (same && i == j) continue;
    if (same && i > j) std::swap(i, j);
    fn(i, j);
  }
}

std::optional<ExtendedValue> try_sum(const std::vector<ExtendedValue>& xs) {
  try {
    ExtendedValue s(0);
    for (const ExtendedValue& x : xs) s += x;
    return s;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InfConflict) return std::nullopt;
    throw;
  }
}

GridRegion union_of_compacts(const std::vector<GridRegion>& ks) {
  int level = 0;
  for (const GridRegion& k : ks) level = std::max(level, k.level());
  CellSet s = CellSet::empty(level);
  for (const GridRegion& k : ks) s = unite(s, k.cells());
  return GridRegion::closed(s);
}

// Incident cells of the point (i/2, j/2) given in doubled coordinates.
std::vector<Cell> incident(std::int64_t i, std::int64_t j) {
  auto axis = [](std::int64_t d) {
    return d % 2 == 0 ? std::vector<std::int64_t>{d / 2 - 1, d / 2} : std::vector<std::int64_t>{(d - 1) / 2};
  };
  std::vector<Cell> out;
  for (std::int64_t x : axis(i)) {
    for (std::int64_t y : axis(j)) out.push_back({x, y});
  }
  return out;
}

// U(T) u U(T') as a grid open set, when every point whose incident cells lie in T u T' already
// has them all in T or all in T'. Bounded inputs only.
std::optional<GridRegion> open_union(const GridRegion& u, const GridRegion& v) {
  const int level = std::max(u.level(), v.level());
  const CellSet t = u.cells().at_level(level), s = v.cells().at_level(level);
  const CellSet w = unite(t, s);
  for (const Cell& c : w.members()) {
    for (std::int64_t i = 2 * c.x; i <= 2 * c.x + 2; ++i) {
      for (std::int64_t j = 2 * c.y; j <= 2 * c.y + 2; ++j) {
        bool in_w = true, in_t = true, in_s = true;
        for (const Cell& d : incident(i, j)) {
          in_w = in_w && w.contains(d);
          in_t = in_t && t.contains(d);
          in_s = in_s && s.contains(d);
        }
        if (in_w && !in_t && !in_s) return std::nullopt;
      }
    }
  }
  return GridRegion::open(w);
}

// The box within which cofinite regions are clipped when approximated.
BoundingBox clip_box(const SetFunction& f, const ProbeFamily& probes) {
  return f.window() ? unite(*f.window(), probes.options().window) : probes.options().window;
}

int chain_steps(const GridRegion& a, const ProbeFamily& probes) {
  return std::max(0, std::min(probes.options().refinement_depth, probes.options().max_chain_level - a.level()));
}

// Largest compact inside open `a` at `level`; cofinite pools are clipped to `clip` grown by `grow`.
GridRegion inner_approx(const GridRegion& a, int level, const BoundingBox& clip, std::int64_t grow) {
  CellSet pool = erode(a.cells().at_level(level));
  if (pool.cofinite()) pool = intersect(pool, CellSet::box(level, clip.expanded(grow)));
  return GridRegion::closed(pool);
}

GridRegion outer_approx(const GridRegion& a, int level) { return GridRegion::open(dilate(a.cells().at_level(level))); }

struct LimitOutcome {
  Verdict verdict;
  int depth;
};

// Exact from some depth on: PASS at that depth. Otherwise gaps to the target that never grow
// and shrink by at least a quarter over the last step (erosion margins halve per level) are an
// asymptotic PASS. Anything else is INCONCLUSIVE.
LimitOutcome judge_limit(const ExtendedValue& target, const std::vector<ExtendedValue>& seq) {
  const int d = static_cast<int>(seq.size()) - 1;
  int m = d + 1;
  while (m > 0 && seq[m - 1] == target) --m;
  if (m <= d) return {Verdict::Pass, m};
  bool finite = target.is_finite();
  for (const ExtendedValue& v : seq) finite = finite && v.is_finite();
  if (finite && d >= 1) {
    std::vector<Rational> gap;
    for (const ExtendedValue& v : seq) gap.push_back(abs(target.finite() - v.finite()));
    bool ok = gap[d] * Rational(4) <= gap[d - 1] * Rational(3);
    for (int k = 1; k <= d && ok; ++k) ok = gap[k] <= gap[k - 1];
    if (ok) return {Verdict::Pass, d};
  }
  // A chain that stalls short of the target may still reach it deeper down (a hole closed by
  // every dilation up to the depth cap), so it is not a counterexample.
  return {Verdict::Inconclusive, d};
}

void judge_chain(Recorder& rec, const SetFunction& f, const GridRegion& target,
                 const std::vector<GridRegion>& chain) {
  rec.tested();
  const ExtendedValue t = f(target);
  std::vector<ExtendedValue> seq;
  for (const GridRegion& r : chain) seq.push_back(f(r));
  if (seq.empty()) return;
  const LimitOutcome o = judge_limit(t, seq);
  rec.depth(o.depth);
  if (o.verdict == Verdict::Inconclusive) rec.unsettled(&target);
}

Witness additive_witness(const SetFunction& f, const std::vector<GridRegion>& parts, const GridRegion& whole,
                         const std::string& note) {
  Witness w{"additive", parts, {}, note};
  for (const GridRegion& p : parts) w.values.push_back(f(p));
  w.regions.push_back(whole);
  w.values.push_back(f(whole));
  return w;
}

// Checks f(whole) = sum f(parts); pairs whose sum is undefined are skipped.
void expect_additive(Recorder& rec, const SetFunction& f, const std::vector<GridRegion>& parts,
                     const GridRegion& whole, const std::string& note) {
  std::vector<ExtendedValue> vals;
  for (const GridRegion& p : parts) vals.push_back(f(p));
  const std::optional<ExtendedValue> sum = try_sum(vals);
  if (!sum) return;
  rec.tested();
  if (*sum != f(whole)) rec.fail(additive_witness(f, parts, whole, note));
}

std::vector<GridRegion> nonempty(std::vector<GridRegion> rs) {
  std::erase_if(rs, [](const GridRegion& r) { return r.is_empty(); });
  return rs;
}

}  // namespace

CheckReport check_nonnegative(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("nonnegative", opts);
  for (const GridRegion& r : probes.regions()) {
    rec.tested();
    const ExtendedValue v = f(r);
    if (v < ExtendedValue(0)) rec.fail({"negative", {r}, {v}, ""});
  }
  return rec.finish();
}

CheckReport check_additivity_compacts(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("additivity_compacts", opts);
  const std::vector<GridRegion> ks = nonempty(probes.compacts());
  const std::size_t limit = probes.options().pair_limit;
  for_pairs(ks.size(), ks.size(), true, limit, probes.options().seed, [&](std::size_t i, std::size_t j) {
    if (!disjoint(ks[i], ks[j])) return;
    expect_additive(rec, f, {ks[i], ks[j]}, union_of_compacts({ks[i], ks[j]}), "disjoint compacts");
  });
  // Triples and quadruples of pairwise disjoint compacts, sampled.
  if (ks.size() >= 3) {
    std::mt19937_64 rng(probes.options().seed + 1);
    const std::size_t tries = std::min<std::size_t>(limit / 4 + 1, 20000);
    for (std::size_t k = 0; k < tries; ++k) {
      const std::size_t n = 3 + k % 2;
      std::vector<GridRegion> parts;
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a) {
        const GridRegion& c = ks[rng() % ks.size()];
        for (const GridRegion& b : parts) ok = ok && disjoint(b, c);
        parts.push_back(c);
      }
      if (ok) expect_additive(rec, f, parts, union_of_compacts(parts), "disjoint compacts");
    }
  }
  return rec.finish();
}

CheckReport check_additivity_opens(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("additivity_opens", opts);
  const std::vector<GridRegion> us = nonempty(probes.opens());
  for_pairs(us.size(), us.size(), true, probes.options().pair_limit, probes.options().seed,
            [&](std::size_t i, std::size_t j) {
              if (!disjoint(us[i], us[j])) return;
              const std::optional<GridRegion> u = disjoint_union(us[i], us[j]);
              if (u) expect_additive(rec, f, {us[i], us[j]}, *u, "disjoint opens");
            });
  return rec.finish();
}

CheckReport check_tm1(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("tm1", opts);
  const std::vector<GridRegion> all = nonempty(probes.regions());
  const std::size_t limit = probes.options().pair_limit;
  for_pairs(all.size(), all.size(), true, limit, probes.options().seed, [&](std::size_t i, std::size_t j) {
    if (!disjoint(all[i], all[j])) return;
    const std::optional<GridRegion> u = disjoint_union(all[i], all[j]);
    if (u) expect_additive(rec, f, {all[i], all[j]}, *u, "disjoint union");
  });
  // U = K u (U \ K) for compacts inside opens.
  const std::vector<GridRegion> ks = nonempty(probes.compacts());
  const std::vector<GridRegion> us = nonempty(probes.opens());
  for_pairs(ks.size(), us.size(), false, limit, probes.options().seed + 2, [&](std::size_t i, std::size_t j) {
    if (!subset(ks[i], us[j])) return;
    expect_additive(rec, f, {ks[i], set_minus_compact(us[j], ks[i])}, us[j], "compact inside open");
  });
  return rec.finish();
}

CheckReport check_modularity(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("modularity", opts);
  const std::vector<GridRegion> us = nonempty(probes.bounded_opens());
  for_pairs(us.size(), us.size(), true, probes.options().pair_limit, probes.options().seed,
            [&](std::size_t i, std::size_t j) {
              const std::optional<GridRegion> uv = open_union(us[i], us[j]);
              if (!uv) return;
              const int level = std::max(us[i].level(), us[j].level());
              const GridRegion meet = GridRegion::open(
                  intersect(us[i].cells().at_level(level), us[j].cells().at_level(level)));
              const ExtendedValue a = f(us[i]), b = f(us[j]), c = f(*uv), d = f(meet);
              const std::optional<ExtendedValue> lhs = try_sum({c, d}), rhs = try_sum({a, b});
              if (!lhs || !rhs) return;
              rec.tested();
              if (*lhs != *rhs) rec.fail({"modular", {us[i], us[j], *uv, meet}, {a, b, c, d}, "open cover"});
            });
  return rec.finish();
}

CheckReport check_agreement(const SetFunction& f, const SetFunction& g, const ProbeFamily& probes,
                            const CheckOptions& opts) {
  Recorder rec("agreement", opts);
  for (const GridRegion& r : probes.regions()) {
    rec.tested();
    const ExtendedValue a = f(r), b = g(r);
    if (a != b) rec.fail({"differs", {r}, {a, b}, f.name() + " vs " + g.name()});
  }
  return rec.finish();
}

CheckReport check_regularity(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("regularity", opts);
  const BoundingBox clip = clip_box(f, probes);
  for (const GridRegion& a : probes.regions()) {
    if (a.is_empty() || a.is_whole()) continue;
    const int steps = chain_steps(a, probes);
    std::vector<GridRegion> chain;
    for (int m = 0; m <= steps; ++m) {
      const int level = a.level() + m;
      chain.push_back(a.kind() == Kind::Open ? inner_approx(a, level, clip, m + 1) : outer_approx(a, level));
    }
    judge_chain(rec, f, a, chain);
  }
  return rec.finish();
}

CheckReport check_tau_smooth(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("tau_smooth", opts);
  const std::vector<GridRegion> us = nonempty(probes.bounded_opens());
  const std::vector<GridRegion> ks = nonempty(probes.compacts());
  // Increasing opens U(erode(T_m)) and decreasing compacts K(dilate(S_m)).
  for (const GridRegion& u : us) {
    std::vector<GridRegion> chain;
    for (int m = 0; m <= chain_steps(u, probes); ++m) chain.push_back(GridRegion::open(erode(u.cells().at_level(u.level() + m))));
    judge_chain(rec, f, u, chain);
  }
  for (const GridRegion& k : ks) {
    std::vector<GridRegion> chain;
    for (int m = 0; m <= chain_steps(k, probes); ++m) chain.push_back(GridRegion::closed(dilate(k.cells().at_level(k.level() + m))));
    judge_chain(rec, f, k, chain);
  }
  // Random increasing chains: erosion cells plus the previous set's children plus random cells.
  if (!us.empty()) {
    std::mt19937_64 rng(probes.options().seed + 3);
    for (int c = 0; c < probes.options().chain_count; ++c) {
      const GridRegion& u = us[rng() % us.size()];
      std::vector<GridRegion> chain;
      CellSet prev = CellSet::empty(u.level());
      for (int m = 0; m <= chain_steps(u, probes); ++m) {
        const int level = u.level() + m;
        const CellSet t = u.cells().at_level(level);
        std::vector<Cell> extra;
        for (const Cell& cell : t.members()) {
          if (rng() % 4 == 0) extra.push_back(cell);
        }
        CellSet next = unite(unite(erode(t), prev.at_level(level)), CellSet::from_sorted(level, std::move(extra)));
        chain.push_back(GridRegion::open(next));
        prev = std::move(next);
      }
      judge_chain(rec, f, u, chain);
    }
  }
  return rec.finish();
}

CheckReport check_solid_limits(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("solid_limits", opts);
  for (const GridRegion& u : nonempty(probes.bounded_opens())) {
    if (!is_solid(u)) continue;
    std::vector<GridRegion> chain;
    for (int m = 0; m <= chain_steps(u, probes); ++m) {
      const GridRegion k = GridRegion::closed(erode(u.cells().at_level(u.level() + m)));
      if (k.is_empty()) {
        chain.push_back(k);
        continue;
      }
      // The hull of the largest component is a solid compact inside the solid open.
      ComponentList comps = components(k);
      const auto big = std::max_element(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        return a.region.cells().members().size() < b.region.cells().members().size();
      });
      chain.push_back(solid_hull(big->region));
    }
    judge_chain(rec, f, u, chain);
  }
  // Growing solid squares toward X.
  const BoundingBox clip = clip_box(f, probes);
  std::vector<GridRegion> squares;
  for (int m = 0; m <= probes.options().refinement_depth; ++m) {
    squares.push_back(GridRegion::closed(CellSet::box(0, clip.expanded(m))));
  }
  judge_chain(rec, f, GridRegion::whole(), squares);
  return rec.finish();
}

CheckReport check_additivity_equivalence(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  CheckReport out;
  out.check = "additivity_equivalence";
  out.parts.push_back(check_additivity_compacts(f, probes, opts));
  out.parts.push_back(check_additivity_opens(f, probes, opts));
  const Verdict a = out.parts[0].verdict, b = out.parts[1].verdict;
  out.stats.probes = out.parts[0].stats.probes + out.parts[1].stats.probes;
  out.detail = "compacts " + std::string(to_string(a)) + ", opens " + std::string(to_string(b));
  if ((a == Verdict::Fail) != (b == Verdict::Fail)) {
    out.verdict = Verdict::Fail;
    for (const CheckReport& p : out.parts) out.witnesses.insert(out.witnesses.end(), p.witnesses.begin(), p.witnesses.end());
  }
  return out;
}

CheckReport check_small_sets(const SetFunction& f, const ProbeFamily& probes, const Rational& eps,
                             const CheckOptions& opts) {
  Recorder rec("small_sets", opts);
  for (const GridRegion& u : nonempty(probes.bounded_opens())) {
    rec.tested();
    std::optional<Witness> worst;
    bool found = false;
    for (int m = 0; m <= chain_steps(u, probes) && !found; ++m) {
      const int level = u.level() + m;
      const CellSet pool = erode(u.cells().at_level(level));
      const GridRegion c = GridRegion::closed(pool);
      VariationOptions vo = opts.variation;
      vo.level_cap = std::max(vo.level_cap, level + 1);
      const ExtendedValue tv = total_variation(f, set_minus_compact(u, c), vo).value;
      // Pairs C in A in B in U from C, the next finer erosion C', the open dilation of C and U.
      const GridRegion finer = GridRegion::closed(erode(u.cells().at_level(level + 1)));
      std::vector<GridRegion> chain{c, finer};
      const GridRegion dc = outer_approx(c, level + 1);
      if (subset(dc, u)) chain.push_back(dc);
      chain.push_back(u);
      ExtendedValue gap(0);
      GridRegion wa = c, wb = u;
      for (std::size_t i = 0; i < chain.size(); ++i) {
        for (std::size_t j = i + 1; j < chain.size(); ++j) {
          if (!subset(chain[i], chain[j])) continue;
          const ExtendedValue g = abs(f(chain[i]) - f(chain[j]));
          if (g > gap) {
            gap = g;
            wa = chain[i];
            wb = chain[j];
          }
        }
      }
      if (tv < ExtendedValue(eps) && gap < ExtendedValue(eps)) {
        found = true;
        rec.depth(m);
      } else {
        worst = Witness{"small_sets", {u, c, wa, wb}, {ExtendedValue(eps), tv, gap}, ""};
      }
    }
    if (!found) rec.fail(std::move(*worst));
  }
  return rec.finish();
}

CheckReport check_norms(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("norms", opts);
  if (!f.window()) {
    rec.unsettled();
    rec.report().detail = "no support window";
    return rec.finish();
  }
  const NormPair n = norms(f, opts.variation);
  rec.tested();
  if (!n.stabilized) rec.unsettled();
  const Rational two(2);
  if (!(n.norm1 <= n.norm2 && n.norm2 <= two * n.norm1)) rec.fail({"norm", {}, {n.norm1, n.norm2}, "on X"});
  rec.report().detail = "norm1 " + to_string(n.norm1) + ", norm2 " + to_string(n.norm2);
  const std::vector<GridRegion> ks = probes.compacts();
  for (const GridRegion& u : probes.opens()) {
    rec.tested();
    const Variations v = variations(f, u, opts.variation);
    const ExtendedValue hat = std::max(v.plus.value, v.minus.value);
    if (!(hat <= v.total.value && v.total.value <= two * hat)) {
      rec.fail({"norm", {u}, {hat, v.total.value}, "variation sandwich on a probe open"});
    }
    // Probe compacts inside u only give a lower bound for the sup.
    for (const GridRegion& k : ks) {
      if (!subset(k, u)) continue;
      const ExtendedValue fk = abs(f(k));
      if (fk > v.total.value) rec.fail({"norm", {u, k}, {fk, v.total.value}, "probe compact beats |f|"});
    }
  }
  return rec.finish();
}

CheckReport jordan_check(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  Recorder rec("jordan", opts);
  CheckReport pre = check_additivity_compacts(f, probes, opts);
  if (pre.verdict == Verdict::Fail) {
    rec.report().detail = "compact additivity fails; identities not applicable";
    for (Witness& w : pre.witnesses) rec.fail(std::move(w));
    rec.report().parts.push_back(std::move(pre));
    return rec.finish();
  }
  rec.report().parts.push_back(std::move(pre));
  const VariationFunctions vf = variation_functions(f, opts.variation);
  std::size_t checked = 0;
  for (const GridRegion& a : probes.regions()) {
    rec.tested();
    const ExtendedValue v = f(a);
    const Variations d = vf.details(a);
    if (v.is_finite() && !(d.plus.value.is_finite() && d.minus.value.is_finite())) {
      rec.fail({"jordan", {a}, {v, d.plus.value, d.minus.value, d.total.value}, "finite value, infinite variation"});
      continue;
    }
    if (!(d.plus.stabilized && d.minus.stabilized && d.total.stabilized)) {
      rec.unsettled();
      continue;
    }
    ++checked;
    const std::optional<ExtendedValue> diff = try_sum({d.plus.value, -d.minus.value});
    const std::optional<ExtendedValue> sum = try_sum({d.plus.value, d.minus.value});
    if (!diff || *diff != v || !sum || *sum != d.total.value) {
      rec.fail({"jordan", {a}, {v, d.plus.value, d.minus.value, d.total.value}, ""});
    }
  }
  CheckReport out = rec.finish();
  const std::string violations = out.verdict == Verdict::Fail ? out.detail : "";
  // Unsettled probes are reported, not failed; the verdict rests on the settled ones.
  if (out.verdict == Verdict::Inconclusive && checked > 0) out.verdict = Verdict::Pass;
  out.detail = std::to_string(checked) + " settled, " + std::to_string(out.stats.inconclusive) + " unsettled" +
               (violations.empty() ? "" : "; " + violations);
  return out;
}

CheckReport variation_is_dtm_check(const SetFunction& f, const ProbeFamily& probes,
                                   const std::vector<SetFunction>& candidates, const CheckOptions& opts) {
  CheckReport out;
  out.check = "variation_is_dtm";
  const VariationFunctions vf = variation_functions(f, opts.variation);
  for (const SetFunction& g : {vf.plus, vf.minus, vf.total}) {
    std::vector<CheckReport> suite = run_suite("dtm", g, probes, opts);
    CheckReport part;
    part.check = "dtm:" + g.name();
    part.verdict = combine(suite);
    part.parts = std::move(suite);
    out.parts.push_back(std::move(part));
  }
  Recorder bounds("variation_bounds", opts);
  for (const GridRegion& a : probes.regions()) {
    bounds.tested();
    const ExtendedValue v = f(a), p = vf.plus(a), m = vf.minus(a);
    if (p < v) bounds.fail({"dominates", {a}, {p, v}, "f+ >= f"});
    if (m < -v) bounds.fail({"dominates", {a}, {m, -v}, "f- >= -f"});
  }
  out.parts.push_back(bounds.finish());
  for (const SetFunction& kappa : candidates) {
    Recorder rec("minimality:" + kappa.name(), opts);
    bool dominates = true;
    for (const GridRegion& a : probes.regions()) dominates = dominates && kappa(a) >= f(a);
    if (dominates) {
      for (const GridRegion& a : probes.regions()) {
        rec.tested();
        if (kappa(a) < vf.plus(a)) rec.fail({"dominates", {a}, {kappa(a), vf.plus(a)}, "candidate >= f+"});
      }
    } else {
      rec.report().detail = "candidate does not dominate f on the probes";
    }
    out.parts.push_back(rec.finish());
  }
  out.verdict = combine(out.parts);
  for (const CheckReport& p : out.parts) out.stats.probes += p.stats.probes;
  return out;
}

CheckReport classify(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts) {
  CheckReport out;
  out.check = "classify";
  out.parts.push_back(check_nonnegative(f, probes, opts));
  out.parts.push_back(check_additivity_compacts(f, probes, opts));
  out.parts.push_back(check_regularity(f, probes, opts));
  out.parts.push_back(check_tm1(f, probes, opts));
  out.parts.push_back(check_modularity(f, probes, opts));
  auto ok = [&](std::size_t i) { return out.parts[i].verdict != Verdict::Fail; };
  const bool nonneg = ok(0), sdtm = ok(1) && ok(2), stm = sdtm && ok(3), measure = stm && ok(4);
  if (measure) {
    out.detail = nonneg ? "MEASURE" : "SM";
  } else if (stm) {
    out.detail = nonneg ? "TM" : "STM";
  } else if (sdtm) {
    out.detail = nonneg ? "DTM" : "SDTM";
  } else {
    out.detail = "UNKNOWN";
  }
  bool unsettled = false;
  for (const CheckReport& p : out.parts) {
    out.stats.probes += p.stats.probes;
    out.stats.depth = std::max(out.stats.depth, p.stats.depth);
    unsettled = unsettled || p.verdict == Verdict::Inconclusive;
    if (p.verdict == Verdict::Fail) out.witnesses.insert(out.witnesses.end(), p.witnesses.begin(), p.witnesses.end());
  }
  out.verdict = unsettled ? Verdict::Inconclusive : Verdict::Pass;
  return out;
}

std::vector<CheckReport> run_suite(std::string_view suite, const SetFunction& f, const ProbeFamily& probes,
                                   const CheckOptions& opts) {
  std::vector<CheckReport> out;
  if (suite == "classify") {
    out.push_back(classify(f, probes, opts));
    return out;
  }
  const bool positive = suite == "dtm" || suite == "tm";
  const bool full = suite == "tm" || suite == "stm";
  if (!positive && !full && suite != "sdtm") {
    throw Error(ErrorCode::Precondition, "unknown suite '" + std::string(suite) + "'");
  }
  if (positive) out.push_back(check_nonnegative(f, probes, opts));
  out.push_back(check_additivity_compacts(f, probes, opts));
  out.push_back(check_regularity(f, probes, opts));
  if (!positive) out.push_back(check_tau_smooth(f, probes, opts));
  if (full) out.push_back(check_tm1(f, probes, opts));
  if (suite == "stm") out.push_back(check_solid_limits(f, probes, opts));
  return out;
}

Verdict combine(const std::vector<CheckReport>& reports) {
  Verdict v = Verdict::Pass;
  for (const CheckReport& r : reports) {
    if (r.verdict == Verdict::Fail) return Verdict::Fail;
    if (r.verdict == Verdict::Inconclusive) v = Verdict::Inconclusive;
  }
  return v;
}

bool replay(const SetFunction& f, const Witness& w, const CheckOptions& opts) {
  std::vector<ExtendedValue> fresh;
  auto matches = [&](std::size_t count) {
    if (w.values.size() < count) return false;
    for (std::size_t k = 0; k < count; ++k) {
      if (fresh[k] != w.values[k]) return false;
    }
    return true;
  };
  const auto& rs = w.regions;
  if (w.relation == "additive") {
    if (rs.size() < 3) return false;
    for (const GridRegion& r : rs) fresh.push_back(f(r));
    std::vector<ExtendedValue> parts(fresh.begin(), fresh.end() - 1);
    const std::optional<ExtendedValue> sum = try_sum(parts);
    return matches(fresh.size()) && sum && *sum != fresh.back();
  }
  if (w.relation == "modular") {
    if (rs.size() != 4) return false;
    for (const GridRegion& r : rs) fresh.push_back(f(r));
    const std::optional<ExtendedValue> lhs = try_sum({fresh[2], fresh[3]}), rhs = try_sum({fresh[0], fresh[1]});
    return matches(4) && lhs && rhs && *lhs != *rhs;
  }
  if (w.relation == "negative") {
    if (rs.size() != 1) return false;
    fresh.push_back(f(rs[0]));
    return matches(1) && fresh[0] < ExtendedValue(0);
  }
  if (w.relation == "jordan") {
    if (rs.size() != 1) return false;
    const Variations d = variations(f, rs[0], opts.variation);
    fresh = {f(rs[0]), d.plus.value, d.minus.value, d.total.value};
    const std::optional<ExtendedValue> diff = try_sum({fresh[1], -fresh[2]}), sum = try_sum({fresh[1], fresh[2]});
    return matches(4) && (!diff || *diff != fresh[0] || !sum || *sum != fresh[3]);
  }
  if (w.relation == "dominates") {
    if (rs.size() != 1 || w.values.size() != 2) return false;
    return f(rs[0]) == w.values[1] && w.values[0] < w.values[1];
  }
  if (w.relation == "differs") {
    if (rs.size() != 1 || w.values.size() != 2) return false;
    return f(rs[0]) == w.values[0] && w.values[0] != w.values[1];
  }
  if (w.relation == "norm") {
    if (rs.empty()) {
      const NormPair n = norms(f, opts.variation);
      fresh = {n.norm1, n.norm2};
    } else {
      const Variations v = variations(f, rs[0], opts.variation);
      fresh = {rs.size() == 2 ? abs(f(rs[1])) : std::max(v.plus.value, v.minus.value), v.total.value};
      if (rs.size() == 2) return matches(2) && fresh[0] > fresh[1];
    }
    return matches(2) && !(fresh[0] <= fresh[1] && fresh[1] <= Rational(2) * fresh[0]);
  }
  if (w.relation == "small_sets") {
    if (rs.size() != 4 || w.values.size() != 3 || !w.values[0].is_finite()) return false;
    VariationOptions vo = opts.variation;
    vo.level_cap = std::max(vo.level_cap, rs[1].level() + 1);
    const ExtendedValue tv = total_variation(f, set_minus_compact(rs[0], rs[1]), vo).value;
    const ExtendedValue gap = abs(f(rs[2]) - f(rs[3]));
    return tv == w.values[1] && gap == w.values[2] && (tv >= w.values[0] || gap >= w.values[0]);
  }
  return false;
}

}  // namespace qmlab
