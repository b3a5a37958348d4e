#include <algorithm>
#include <random>
#include <unordered_set>

#include "qmlab/checkers.hpp"
#include "qmlab/error.hpp"

namespace qmlab {

namespace {

constexpr std::size_t kMaxExhaustiveCells = 16;

void add_unique(std::vector<GridRegion>& out,
                std::unordered_set<GridRegion, RegionHash, RegionRepEqual>& seen, const GridRegion& r) {
  GridRegion c = r.canonical();
  if (seen.insert(c).second) out.push_back(std::move(c));
}

// Shapes that exhaustive coarse probes miss: an atom's fine cell, a ring enclosing it, a
// neighbourhood of it, and the window with the atom's cell cut out. The rings together, and the
// plane with all of them removed, separate every atom from the others.
void structured(const BoundingBox& window, const std::vector<Point>& atoms, std::vector<GridRegion>& out) {
  out.push_back(GridRegion::whole());
  out.push_back(GridRegion::empty());
  out.push_back(GridRegion::open(CellSet::box(0, window)));
  out.push_back(GridRegion::closed(CellSet::box(0, window)));
  for (const Point& p : atoms) {
    const CellSet one(1, {cell_of(p, 1)});
    out.push_back(GridRegion::closed(one));
    out.push_back(GridRegion::open(dilate(CellSet(2, {cell_of(p, 2)}))));
    const CellSet fine(3, {cell_of(p, 3)});
    out.push_back(GridRegion::closed(difference(dilate(fine), fine)));
    const GridRegion open_window = GridRegion::open(CellSet::box(0, window));
    const GridRegion cut = GridRegion::closed(one);
    if (subset(cut, open_window)) out.push_back(set_minus_compact(open_window, cut));
  }
  if (atoms.size() > 1) {
    // Each hole is the atom's level-2 neighbourhood, so the atom stays visible to searches
    // that start at level 2.
    CellSet rings = CellSet::empty(2);
    for (const Point& p : atoms) {
      const CellSet hole = dilate(CellSet(2, {cell_of(p, 2)}));
      rings = unite(rings, difference(dilate(hole), hole));
    }
    out.push_back(GridRegion::closed(rings));
    out.push_back(complement(GridRegion::closed(rings)));
  }
}

}  // namespace

ProbeFamily::ProbeFamily(ProbeOptions opts, const std::vector<Point>& atoms) : opts_(std::move(opts)) {
  std::unordered_set<GridRegion, RegionHash, RegionRepEqual> seen;
  const CellSet box = CellSet::box(opts_.exhaustive_level, opts_.window);
  const std::vector<Cell>& cells = box.members();
  if (!cells.empty() && cells.size() <= kMaxExhaustiveCells) {
    const std::uint32_t count = std::uint32_t{1} << cells.size();
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      std::vector<Cell> chosen;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (mask & (std::uint32_t{1} << i)) chosen.push_back(cells[i]);
      }
      const CellSet s = CellSet::from_sorted(opts_.exhaustive_level, std::move(chosen));
      add_unique(regions_, seen, GridRegion::closed(s));
      add_unique(regions_, seen, GridRegion::open(s));
    }
  }
  if (opts_.structured) {
    std::vector<GridRegion> extra;
    structured(opts_.window, atoms, extra);
    for (const GridRegion& r : extra) add_unique(regions_, seen, r);
  }
  for (const GridRegion& r : opts_.extra) add_unique(regions_, seen, r);
  if (opts_.random_count > 0) {
    const BoundingBox rw = opts_.random_window == BoundingBox{} ? opts_.window : opts_.random_window;
    const std::vector<Cell> pool = CellSet::box(opts_.random_level, rw).members();
    std::mt19937_64 rng(opts_.seed);
    std::uniform_int_distribution<int> density(1, 6);
    std::uniform_int_distribution<int> coin(0, 9);
    for (int made = 0; made < opts_.random_count;) {
      const int d = density(rng);
      std::vector<Cell> chosen;
      for (const Cell& c : pool) {
        if (static_cast<int>(rng() % 12) < d) chosen.push_back(c);
      }
      GridRegion r(CellSet::from_sorted(opts_.random_level, std::move(chosen)), coin(rng) < 5 ? Kind::Closed : Kind::Open);
      if (coin(rng) == 0) r = complement(r);
      // Duplicates still count toward the requested number so small windows terminate.
      add_unique(regions_, seen, r);
      ++made;
    }
  }
}

std::vector<GridRegion> ProbeFamily::compacts() const {
  std::vector<GridRegion> out;
  for (const GridRegion& r : regions_) {
    if (r.is_compact()) out.push_back(r);
  }
  return out;
}

std::vector<GridRegion> ProbeFamily::bounded_opens() const {
  std::vector<GridRegion> out;
  for (const GridRegion& r : regions_) {
    if (r.is_open() && r.is_bounded()) out.push_back(r);
  }
  return out;
}

std::vector<GridRegion> ProbeFamily::opens() const {
  std::vector<GridRegion> out;
  for (const GridRegion& r : regions_) {
    if (r.is_open()) out.push_back(r);
  }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: break;
  }
  return "INCONCLUSIVE";
}

}  // namespace qmlab
