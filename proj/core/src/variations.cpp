#include "qmlab/variations.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <mutex>
#include <unordered_map>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

using Cells = std::vector<Cell>;
using Mask = std::uint32_t;

std::int64_t chebyshev(Cell a, Cell b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

bool touches(const Cells& a, const Cells& b) {
  for (const Cell& c : a) {
    for (const Cell& d : b) {
      if (chebyshev(c, d) <= 1) return true;
    }
  }
  return false;
}

std::vector<Cells> eight_components(int level, Cells cells) {
  std::vector<Cells> out;
  if (cells.empty()) return out;
  for (const Component& c : components(GridRegion::closed(CellSet(level, std::move(cells))))) {
    out.push_back(c.region.cells().members());
  }
  return out;
}

// Splits a finite pool into connected pieces. Around each atom the pool is cut into the atom's
// cell, the ring at distance 1 and the ring at distance 2, so that the search can hold the atom,
// enclose it without holding it, or keep it apart from the rest. The remainder is split into its
// 8-components.
std::vector<Cells> atom_pieces(const CellSet& pool, const std::vector<Point>& atoms) {
  const int level = pool.level();
  const Cells& members = pool.members();
  std::vector<bool> taken(members.size(), false);
  std::vector<Cells> out;
  for (const Point& p : atoms) {
    const Cell centre = cell_of(p, level);
    for (std::int64_t radius = 0; radius <= 2; ++radius) {
      Cells ring;
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (!taken[k] && chebyshev(members[k], centre) == radius) {
          ring.push_back(members[k]);
          taken[k] = true;
        }
      }
      for (Cells& c : eight_components(level, std::move(ring))) out.push_back(std::move(c));
    }
  }
  Cells rest;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!taken[k]) rest.push_back(members[k]);
  }
  for (Cells& c : eight_components(level, std::move(rest))) out.push_back(std::move(c));
  return out;
}

struct PoolBest {
  ExtendedValue plus{0}, minus{0}, total{0};
  Cells plus_cells, minus_cells, pos_cells, neg_cells, total_cells;
};

bool better(const ExtendedValue& v, const Cells& cells, const ExtendedValue& best, const Cells& best_cells) {
  return v > best || (v == best && cells < best_cells);
}

// Exhaustive search over unions of pieces. Each union is evaluated once; |f| sums |f| over the
// connected components of the union, read back from the same table.
PoolBest search_pieces(const SetFunction& f, int level, const std::vector<Cells>& pieces, int budget) {
  const int n = static_cast<int>(pieces.size());
  if (n > budget || n > 30) {
    throw Error(ErrorCode::SearchBudgetExceeded,
                std::to_string(n) + " search pieces exceed the budget of " + std::to_string(budget));
  }
  std::vector<Mask> adj(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (touches(pieces[i], pieces[j])) {
        adj[i] |= Mask{1} << j;
        adj[j] |= Mask{1} << i;
      }
    }
  }
  const Mask count = Mask{1} << n;
  std::vector<ExtendedValue> val(count, ExtendedValue(0));
  PoolBest best;
  Cells cells;
  for (Mask mask = 0; mask < count; ++mask) {
    cells.clear();
    for (int i = 0; i < n; ++i) {
      if (mask & (Mask{1} << i)) cells.insert(cells.end(), pieces[i].begin(), pieces[i].end());
    }
    std::sort(cells.begin(), cells.end());
    const ExtendedValue v = mask == 0 ? ExtendedValue(0) : f.evaluate_uncached(GridRegion::closed(CellSet::from_sorted(level, cells)));
    val[mask] = v;
    if (better(v, cells, best.plus, best.plus_cells) || mask == 0) {
      best.plus = v;
      best.plus_cells = cells;
    }
    if (better(-v, cells, best.minus, best.minus_cells) || mask == 0) {
      best.minus = -v;
      best.minus_cells = cells;
    }
    ExtendedValue t(0);
    Mask pos = 0, neg = 0, rest = mask;
    while (rest) {
      Mask comp = rest & (~rest + 1), prev = 0;
      while (comp != prev) {
        prev = comp;
        for (int i = 0; i < n; ++i) {
          if (comp & (Mask{1} << i)) comp |= adj[i] & mask;
        }
      }
      rest &= ~comp;
      const ExtendedValue& c = val[comp];
      t += abs(c);
      if (c > ExtendedValue(0)) pos |= comp;
      if (c < ExtendedValue(0)) neg |= comp;
    }
    if (better(t, cells, best.total, best.total_cells) || mask == 0) {
      best.total = t;
      best.total_cells = cells;
      best.pos_cells.clear();
      best.neg_cells.clear();
      for (int i = 0; i < n; ++i) {
        const Mask bit = Mask{1} << i;
        Cells& dst = (pos & bit) ? best.pos_cells : best.neg_cells;
        if ((pos | neg) & bit) dst.insert(dst.end(), pieces[i].begin(), pieces[i].end());
      }
    }
  }
  return best;
}

GridRegion compact(int level, Cells cells) { return GridRegion::closed(CellSet(level, std::move(cells))); }

bool last_two_equal(const std::vector<ExtendedValue>& v) {
  return v.size() >= 2 && v[v.size() - 1] == v[v.size() - 2];
}

// Running maxima over levels from..to of the searches inside U(t). The search keeps refining
// past `to` until two consecutive levels had a nonempty pool holding every atom of f inside
// U(t). An admissible point is a third of a cell away from grid lines at every level, so its
// cell is in the pool from three levels down; the loop stops at from+4 either way.
Variations search_open(const SetFunction& f, const CellSet& t, int from, int to, const VariationOptions& opts) {
  Variations out;
  for (VariationResult* r : {&out.plus, &out.minus, &out.total}) {
    r->value = ExtendedValue(0);
    r->witness = {GridRegion::empty()};
  }
  out.total.witness.push_back(GridRegion::empty());
  std::vector<Point> inside;
  for (const Point& p : f.atoms()) {
    if (t.contains(cell_of(p, t.level()))) inside.push_back(p);
  }
  int settled_run = 0;
  for (int level = from; level <= to || (settled_run < 2 && level <= from + 4); ++level) {
    CellSet pool = erode(t.at_level(level));
    bool holds_atoms = !pool.is_empty();
    for (const Point& p : inside) holds_atoms = holds_atoms && pool.contains(cell_of(p, level));
    settled_run = holds_atoms ? settled_run + 1 : 0;
    if (f.window()) {
      pool = intersect(pool, CellSet::box(level, *f.window()));
    } else if (pool.cofinite()) {
      throw Error(ErrorCode::Precondition, f.name() + " has no support window; cannot search an unbounded region");
    }
    const PoolBest b = search_pieces(f, level, atom_pieces(pool, f.atoms()), opts.budget);
    if (b.plus > out.plus.value) {
      out.plus.value = b.plus;
      out.plus.witness = {compact(level, b.plus_cells)};
    }
    if (b.minus > out.minus.value) {
      out.minus.value = b.minus;
      out.minus.witness = {compact(level, b.minus_cells)};
    }
    if (b.total > out.total.value) {
      out.total.value = b.total;
      out.total.witness = {compact(level, b.pos_cells), compact(level, b.neg_cells)};
    }
    out.plus.by_level.push_back(out.plus.value);
    out.minus.by_level.push_back(out.minus.value);
    out.total.by_level.push_back(out.total.value);
  }
  for (VariationResult* r : {&out.plus, &out.minus, &out.total}) {
    r->stabilized = last_two_equal(r->by_level) && settled_run >= 2;
    r->level_cap = from + static_cast<int>(r->by_level.size()) - 1;
  }
  return out;
}

int top_level(int level, const VariationOptions& opts) { return std::max(opts.level_cap, level + 1); }

}  // namespace

Variations variations(const SetFunction& f, const GridRegion& a0, const VariationOptions& opts) {
  const GridRegion a = a0.canonical();
  if (a.is_empty()) {
    Variations out;
    for (VariationResult* r : {&out.plus, &out.minus, &out.total}) {
      r->value = ExtendedValue(0);
      r->witness = {GridRegion::empty()};
      r->stabilized = true;
      r->by_level = {ExtendedValue(0)};
    }
    out.total.witness.push_back(GridRegion::empty());
    return out;
  }
  if (a.kind() == Kind::Open) return search_open(f, a.cells(), a.level(), top_level(a.level(), opts), opts);

  // Closed: infimum over the open dilations U(dilate(refine^j S)).
  Variations best;
  std::vector<ExtendedValue> seq[3];
  bool have = false;
  for (int j = 0; j <= opts.dilation_depth; ++j) {
    const int level = a.level() + j;
    const Variations v = search_open(f, dilate(a.cells().at_level(level)), level, top_level(level, opts), opts);
    VariationResult* dst[3] = {&best.plus, &best.minus, &best.total};
    const VariationResult* src[3] = {&v.plus, &v.minus, &v.total};
    for (int k = 0; k < 3; ++k) {
      seq[k].push_back(src[k]->value);
      if (!have || src[k]->value < dst[k]->value) *dst[k] = *src[k];
    }
    have = true;
  }
  // Compacts inside the closed set bound each variation from below. A settled search on the
  // minimizing dilation bounds it from above; when the two meet the value is exact.
  std::optional<PoolBest> inner;
  if (a.is_bounded() || f.window()) {
    const int level = top_level(a.level(), opts);
    CellSet pool = a.cells().at_level(level);
    if (pool.cofinite()) pool = intersect(pool, CellSet::box(level, *f.window()));
    inner = search_pieces(f, level, atom_pieces(pool, f.atoms()), opts.budget);
  }
  VariationResult* dst[3] = {&best.plus, &best.minus, &best.total};
  const ExtendedValue lower[3] = {inner ? inner->plus : ExtendedValue::neg_inf(),
                                  inner ? inner->minus : ExtendedValue::neg_inf(),
                                  inner ? inner->total : ExtendedValue::neg_inf()};
  for (int k = 0; k < 3; ++k) {
    dst[k]->stabilized = dst[k]->stabilized && (last_two_equal(seq[k]) || dst[k]->value == lower[k]);
    dst[k]->by_level = seq[k];
  }
  return best;
}

VariationResult variation_plus(const SetFunction& f, const GridRegion& a, const VariationOptions& opts) {
  return variations(f, a, opts).plus;
}
VariationResult variation_minus(const SetFunction& f, const GridRegion& a, const VariationOptions& opts) {
  return variations(f, a, opts).minus;
}
VariationResult total_variation(const SetFunction& f, const GridRegion& a, const VariationOptions& opts) {
  return variations(f, a, opts).total;
}

VariationFunctions variation_functions(const SetFunction& f, const VariationOptions& opts) {
  struct Cache {
    std::mutex mutex;
    std::unordered_map<GridRegion, Variations, RegionHash, RegionRepEqual> map;
  };
  auto cache = std::make_shared<Cache>();
  VariationFunctions out;
  out.details = [f, opts, cache](const GridRegion& r) {
    const GridRegion c = r.canonical();
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->map.find(c); it != cache->map.end()) return it->second;
    }
    Variations v = variations(f, c, opts);
    std::lock_guard lock(cache->mutex);
    return cache->map.emplace(c, std::move(v)).first->second;
  };
  auto make = [&](const std::string& prefix, auto pick) {
    SetFunction::Info info = f.info();
    info.name = prefix + "(" + f.name() + ")";
    info.claimed = FunctionClass::DTM;
    info.infinity = InfinitySign::None;
    auto details = out.details;
    return SetFunction(std::move(info), [details, pick](const GridRegion& r) { return pick(details(r)).value; });
  };
  out.plus = make("plus", [](const Variations& v) { return v.plus; });
  out.minus = make("minus", [](const Variations& v) { return v.minus; });
  out.total = make("total", [](const Variations& v) { return v.total; });
  return out;
}

ExtendedValue grouped_total_variation(const SetFunction& f, const CellSet& pool, int budget) {
  if (pool.cofinite()) throw Error(ErrorCode::Precondition, "oracle pools must be finite");
  std::vector<Cells> pieces;
  for (const Cell& c : pool.members()) pieces.push_back({c});
  return search_pieces(f, pool.level(), pieces, budget).total;
}

ExtendedValue naive_total_variation(const SetFunction& f, const CellSet& pool, int budget) {
  if (pool.cofinite()) throw Error(ErrorCode::Precondition, "oracle pools must be finite");
  const Cells& cells = pool.members();
  const int n = static_cast<int>(cells.size());
  if (n > budget) {
    throw Error(ErrorCode::SearchBudgetExceeded, std::to_string(n) + " cells exceed the partition budget");
  }
  std::vector<std::optional<ExtendedValue>> memo(std::size_t{1} << n);
  auto value = [&](Mask block) {
    auto& slot = memo[block];
    if (!slot) {
      Cells s;
      for (int i = 0; i < n; ++i) {
        if (block & (Mask{1} << i)) s.push_back(cells[i]);
      }
      slot = f.evaluate_uncached(compact(pool.level(), std::move(s)));
    }
    return *slot;
  };
  // label[i] = 0 leaves cell i out; labels 1..k name blocks in order of first use.
  std::vector<int> label(n, 0);
  ExtendedValue best(0);
  auto recurse = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      std::vector<Mask> blocks(used, 0);
      for (int k = 0; k < n; ++k) {
        if (label[k] > 0) blocks[label[k] - 1] |= Mask{1} << k;
      }
      ExtendedValue sum(0);
      for (Mask b : blocks) sum += abs(value(b));
      best = std::max(best, sum);
      return;
    }
    for (int l = 0; l <= used + 1; ++l) {
      bool ok = true;
      for (int k = 0; k < i && ok && l > 0; ++k) {
        if (label[k] > 0 && label[k] != l && chebyshev(cells[k], cells[i]) <= 1) ok = false;
      }
      if (!ok) continue;
      label[i] = l;
      self(self, i + 1, std::max(used, l));
    }
    label[i] = 0;
  };
  recurse(recurse, 0, 0);
  return best;
}

NormPair norms(const SetFunction& f, const VariationOptions& opts) {
  if (!f.window()) throw Error(ErrorCode::Precondition, f.name() + " has no support window");
  const Variations v = variations(f, GridRegion::whole(), opts);
  return {std::max(v.plus.value, v.minus.value), v.total.value,
          v.plus.stabilized && v.minus.stabilized && v.total.stabilized};
}

}  // namespace qmlab
