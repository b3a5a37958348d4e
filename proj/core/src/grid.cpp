#include "qmlab/grid.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

constexpr std::array<std::pair<int, int>, 4> kFour{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<std::pair<int, int>, 8> kEight{
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

std::int64_t scale(std::int64_t v, int steps) { return v * (std::int64_t{1} << steps); }

std::int64_t floor_div(__int128 num, __int128 den) {
  __int128 q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return static_cast<std::int64_t>(q);
}

bool power_of_two(std::int64_t d) { return d > 0 && (d & (d - 1)) == 0; }

void sort_unique(std::vector<Cell>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool sorted_contains(const std::vector<Cell>& v, Cell c) {
  return std::binary_search(v.begin(), v.end(), c);
}

std::vector<Cell> set_union(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::vector<Cell> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Cell> set_intersection(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::vector<Cell> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Cell> set_difference(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::vector<Cell> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Dense occupancy grid over a finite window, used for component labelling.
class Raster {
 public:
  Raster(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1)
      : x0_(x0), y0_(y0), w_(x1 - x0), h_(y1 - y0), in_(static_cast<std::size_t>(w_ * h_), 0) {}

  bool inside(std::int64_t x, std::int64_t y) const {
    return x >= x0_ && y >= y0_ && x < x0_ + w_ && y < y0_ + h_;
  }
  std::size_t index(std::int64_t x, std::int64_t y) const {
    return static_cast<std::size_t>((y - y0_) * w_ + (x - x0_));
  }
  void set(Cell c, bool v) { in_[index(c.x, c.y)] = v ? 1 : 0; }
  bool get(std::int64_t x, std::int64_t y) const { return inside(x, y) && in_[index(x, y)] != 0; }
  bool on_border(std::int64_t x, std::int64_t y) const {
    return x == x0_ || y == y0_ || x == x0_ + w_ - 1 || y == y0_ + h_ - 1;
  }
  std::int64_t x0() const { return x0_; }
  std::int64_t y0() const { return y0_; }
  std::int64_t width() const { return w_; }
  std::int64_t height() const { return h_; }

 private:
  std::int64_t x0_, y0_, w_, h_;
  std::vector<std::uint8_t> in_;
};

struct Labeling {
  std::vector<std::vector<Cell>> bounded;
  std::optional<CellSet> unbounded;
};

// Components of a cell set under 4- or 8-adjacency. For a cofinite set the labelling runs
// inside the members' bounding box grown by two cells; everything reaching the box border
// belongs to the single unbounded component.
Labeling label(const CellSet& s, bool eight) {
  Labeling out;
  if (s.is_empty()) return out;
  if (s.is_all()) {
    out.unbounded = s;
    return out;
  }
  const auto& m = s.members();
  std::int64_t x0 = std::numeric_limits<std::int64_t>::max(), y0 = x0;
  std::int64_t x1 = std::numeric_limits<std::int64_t>::min(), y1 = x1;
  for (const Cell& c : m) {
    x0 = std::min(x0, c.x);
    y0 = std::min(y0, c.y);
    x1 = std::max(x1, c.x + 1);
    y1 = std::max(y1, c.y + 1);
  }
  const std::int64_t pad = s.cofinite() ? 2 : 0;
  Raster raster(x0 - pad, y0 - pad, x1 + pad, y1 + pad);
  if (s.cofinite()) {
    for (std::int64_t y = raster.y0(); y < raster.y0() + raster.height(); ++y) {
      for (std::int64_t x = raster.x0(); x < raster.x0() + raster.width(); ++x) {
        raster.set({x, y}, true);
      }
    }
    for (const Cell& c : m) raster.set(c, false);
  } else {
    for (const Cell& c : m) raster.set(c, true);
  }

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(raster.width() * raster.height()), 0);
  std::vector<Cell> unbounded_cells;
  std::deque<Cell> queue;
  for (std::int64_t x = raster.x0(); x < raster.x0() + raster.width(); ++x) {
    for (std::int64_t y = raster.y0(); y < raster.y0() + raster.height(); ++y) {
      if (!raster.get(x, y) || seen[raster.index(x, y)]) continue;
      std::vector<Cell> comp;
      bool touches_border = false;
      seen[raster.index(x, y)] = 1;
      queue.push_back({x, y});
      while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        comp.push_back(c);
        touches_border = touches_border || raster.on_border(c.x, c.y);
        auto visit = [&](int dx, int dy) {
          const std::int64_t nx = c.x + dx, ny = c.y + dy;
          if (raster.get(nx, ny) && !seen[raster.index(nx, ny)]) {
            seen[raster.index(nx, ny)] = 1;
            queue.push_back({nx, ny});
          }
        };
        if (eight) {
          for (auto [dx, dy] : kEight) visit(dx, dy);
        } else {
          for (auto [dx, dy] : kFour) visit(dx, dy);
        }
      }
      std::sort(comp.begin(), comp.end());
      if (s.cofinite() && touches_border) {
        unbounded_cells.insert(unbounded_cells.end(), comp.begin(), comp.end());
      } else {
        out.bounded.push_back(std::move(comp));
      }
    }
  }
  std::sort(out.bounded.begin(), out.bounded.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  if (s.cofinite()) {
    // Excluded cells of the unbounded component: the set's own complement plus bounded parts.
    std::vector<Cell> excluded = m;
    for (const auto& comp : out.bounded) excluded.insert(excluded.end(), comp.begin(), comp.end());
    out.unbounded = CellSet(s.level(), std::move(excluded), true);
  }
  return out;
}

std::vector<Cell> neighbourhood(Cell c) {
  std::vector<Cell> out;
  out.reserve(9);
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) out.push_back({c.x + dx, c.y + dy});
  }
  return out;
}

GridRegion with_cells(const GridRegion& like, CellSet cells) { return {std::move(cells), like.kind()}; }

}  // namespace

// ---------------------------------------------------------------------------- points

bool is_admissible(const Point& p) {
  return !power_of_two(p.x.denominator()) && !power_of_two(p.y.denominator());
}

void require_admissible(const Point& p) {
  if (!is_admissible(p)) {
    throw Error(ErrorCode::DyadicPoint, to_string(p) + " lies on a dyadic grid line");
  }
}

Cell cell_of(const Point& p, int level) {
  const __int128 s = __int128{1} << level;
  return {floor_div(static_cast<__int128>(p.x.numerator()) * s, p.x.denominator()),
          floor_div(static_cast<__int128>(p.y.numerator()) * s, p.y.denominator())};
}

std::string to_string(const Point& p) { return "(" + to_string(p.x) + "," + to_string(p.y) + ")"; }

bool BoundingBox::contains(Cell c, int level) const {
  return c.x >= scale(x0, level) && c.x < scale(x1, level) && c.y >= scale(y0, level) &&
         c.y < scale(y1, level);
}

BoundingBox unite(const BoundingBox& a, const BoundingBox& b) {
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

BoundingBox box_around(const Point& p) {
  const Cell c = cell_of(p, 0);
  return {c.x, c.y, c.x + 1, c.y + 1};
}

// ---------------------------------------------------------------------------- CellSet

CellSet::CellSet(int level, std::vector<Cell> members, bool cofinite)
    : level_(level), cofinite_(cofinite), members_(std::move(members)) {
  if (level < 0) throw Error(ErrorCode::Precondition, "negative level");
  sort_unique(members_);
}

CellSet CellSet::box(int level, const BoundingBox& b) {
  std::vector<Cell> cells;
  for (std::int64_t x = scale(b.x0, level); x < scale(b.x1, level); ++x) {
    for (std::int64_t y = scale(b.y0, level); y < scale(b.y1, level); ++y) cells.push_back({x, y});
  }
  return CellSet(level, std::move(cells), false);
}

bool CellSet::contains(Cell c) const { return sorted_contains(members_, c) != cofinite_; }

CellSet CellSet::refined(int steps) const {
  if (steps <= 0) return *this;
  const std::int64_t k = std::int64_t{1} << steps;
  std::vector<Cell> out;
  out.reserve(members_.size() * static_cast<std::size_t>(k * k));
  for (const Cell& c : members_) {
    for (std::int64_t dx = 0; dx < k; ++dx) {
      for (std::int64_t dy = 0; dy < k; ++dy) out.push_back({c.x * k + dx, c.y * k + dy});
    }
  }
  return CellSet(level_ + steps, std::move(out), cofinite_);
}

CellSet CellSet::at_level(int level) const {
  if (level < level_) throw Error(ErrorCode::Precondition, "cannot refine to a coarser level");
  return refined(level - level_);
}

CellSet CellSet::coarsened() const {
  if (members_.empty()) return CellSet(0, {}, cofinite_, Sorted{});
  CellSet cur = *this;
  while (cur.level_ > 0) {
    std::vector<Cell> parents;
    parents.reserve(cur.members_.size());
    for (const Cell& c : cur.members_) parents.push_back({c.x >> 1, c.y >> 1});
    std::sort(parents.begin(), parents.end());
    bool complete = true;
    std::vector<Cell> unique_parents;
    for (std::size_t i = 0; i < parents.size();) {
      std::size_t j = i;
      while (j < parents.size() && parents[j] == parents[i]) ++j;
      if (j - i != 4) {
        complete = false;
        break;
      }
      unique_parents.push_back(parents[i]);
      i = j;
    }
    if (!complete) break;
    cur = CellSet(cur.level_ - 1, std::move(unique_parents), cur.cofinite_, Sorted{});
  }
  return cur;
}

CellSet CellSet::clipped(const BoundingBox& b) const {
  if (!cofinite_) {
    std::vector<Cell> out;
    for (const Cell& c : members_) {
      if (b.contains(c, level_)) out.push_back(c);
    }
    return CellSet(level_, std::move(out), false, Sorted{});
  }
  std::vector<Cell> out;
  for (std::int64_t x = scale(b.x0, level_); x < scale(b.x1, level_); ++x) {
    for (std::int64_t y = scale(b.y0, level_); y < scale(b.y1, level_); ++y) {
      if (!sorted_contains(members_, {x, y})) out.push_back({x, y});
    }
  }
  return CellSet(level_, std::move(out), false, Sorted{});
}

int common_level(const CellSet& a, const CellSet& b) { return std::max(a.level(), b.level()); }

CellSet unite(const CellSet& a0, const CellSet& b0) {
  const int l = common_level(a0, b0);
  const CellSet a = a0.at_level(l), b = b0.at_level(l);
  if (a.finite() && b.finite()) return CellSet(l, set_union(a.members(), b.members()));
  if (a.finite()) return CellSet(l, set_difference(b.members(), a.members()), true);
  if (b.finite()) return CellSet(l, set_difference(a.members(), b.members()), true);
  return CellSet(l, set_intersection(a.members(), b.members()), true);
}

CellSet intersect(const CellSet& a0, const CellSet& b0) {
  const int l = common_level(a0, b0);
  const CellSet a = a0.at_level(l), b = b0.at_level(l);
  if (a.finite() && b.finite()) return CellSet(l, set_intersection(a.members(), b.members()));
  if (a.finite()) return CellSet(l, set_difference(a.members(), b.members()));
  if (b.finite()) return CellSet(l, set_difference(b.members(), a.members()));
  return CellSet(l, set_union(a.members(), b.members()), true);
}

CellSet difference(const CellSet& a, const CellSet& b) { return intersect(a, b.complement()); }

bool is_subset(const CellSet& a0, const CellSet& b0) {
  const int l = common_level(a0, b0);
  const CellSet a = a0.at_level(l), b = b0.at_level(l);
  const auto& am = a.members();
  const auto& bm = b.members();
  if (a.finite() && b.finite()) return std::includes(bm.begin(), bm.end(), am.begin(), am.end());
  if (a.finite()) return set_intersection(am, bm).empty();
  if (b.finite()) return false;
  return std::includes(am.begin(), am.end(), bm.begin(), bm.end());
}

bool intersects(const CellSet& a, const CellSet& b) { return !intersect(a, b).is_empty(); }

bool four_adjacent(const CellSet& a0, const CellSet& b0) {
  const int l = common_level(a0, b0);
  CellSet a = a0.at_level(l), b = b0.at_level(l);
  if (a.is_empty() || b.is_empty()) return false;
  if (a.cofinite() && b.cofinite()) return true;
  if (a.cofinite()) std::swap(a, b);
  for (const Cell& c : a.members()) {
    for (auto [dx, dy] : kFour) {
      if (b.contains({c.x + dx, c.y + dy})) return true;
    }
  }
  return false;
}

CellSet dilate(const CellSet& s) {
  if (s.cofinite()) return erode(s.complement()).complement();
  std::vector<Cell> out;
  out.reserve(s.members().size() * 9);
  for (const Cell& c : s.members()) {
    for (const Cell& n : neighbourhood(c)) out.push_back(n);
  }
  return CellSet(s.level(), std::move(out));
}

CellSet erode(const CellSet& t) {
  if (t.cofinite()) return dilate(t.complement()).complement();
  std::vector<Cell> out;
  for (const Cell& c : t.members()) {
    const auto n = neighbourhood(c);
    if (std::all_of(n.begin(), n.end(), [&](Cell d) { return sorted_contains(t.members(), d); })) {
      out.push_back(c);
    }
  }
  return CellSet(t.level(), std::move(out));
}

// ---------------------------------------------------------------------------- GridRegion

GridRegion GridRegion::canonical() const {
  if (is_empty()) return empty();
  if (is_whole()) return whole();
  return {cells_.coarsened(), kind_};
}

bool GridRegion::contains(const Point& p) const {
  require_admissible(p);
  return cells_.contains(cell_of(p, level()));
}

bool operator==(const GridRegion& a, const GridRegion& b) {
  return RegionRepEqual{}(a.canonical(), b.canonical());
}

std::size_t RegionHash::operator()(const GridRegion& r) const {
  std::size_t h = std::hash<int>{}(r.level() * 4 + (r.kind() == Kind::Open ? 1 : 0) +
                                   (r.cells().cofinite() ? 2 : 0));
  for (const Cell& c : r.cells().members()) {
    h ^= std::hash<std::int64_t>{}(c.x * 1000003 + c.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

GridRegion complement(const GridRegion& r) {
  return {r.cells().complement(), r.kind() == Kind::Open ? Kind::Closed : Kind::Open};
}

GridRegion closure(const GridRegion& r) { return GridRegion::closed(r.cells()); }

bool subset(const GridRegion& a0, const GridRegion& b0) {
  if (a0.is_empty() || b0.is_whole()) return true;
  const int l = std::max(a0.level(), b0.level());
  const GridRegion a = a0.at_level(l), b = b0.at_level(l);
  if (a.kind() == Kind::Closed && b.kind() == Kind::Closed) return is_subset(a.cells(), b.cells());
  if (a.kind() == Kind::Open && b.kind() == Kind::Open) return is_subset(a.cells(), b.cells());
  if (a.kind() == Kind::Closed) return is_subset(dilate(a.cells()), b.cells());
  return is_subset(a.cells(), b.cells());
}

bool disjoint(const GridRegion& a0, const GridRegion& b0) {
  if (a0.is_empty() || b0.is_empty()) return true;
  const int l = std::max(a0.level(), b0.level());
  const GridRegion a = a0.at_level(l), b = b0.at_level(l);
  if (a.kind() == Kind::Closed && b.kind() == Kind::Closed) {
    return !intersects(dilate(a.cells()), b.cells());
  }
  return !intersects(a.cells(), b.cells());
}

std::optional<GridRegion> disjoint_union(const GridRegion& a0, const GridRegion& b0) {
  if (!disjoint(a0, b0)) throw Error(ErrorCode::Precondition, "disjoint_union of overlapping regions");
  if (a0.is_empty()) return b0;
  if (b0.is_empty()) return a0;
  const int l = std::max(a0.level(), b0.level());
  GridRegion a = a0.at_level(l), b = b0.at_level(l);
  if (a.kind() == Kind::Closed && b.kind() == Kind::Closed) {
    return GridRegion::closed(unite(a.cells(), b.cells()));
  }
  if (a.kind() == Kind::Open && b.kind() == Kind::Open) {
    if (four_adjacent(a.cells(), b.cells())) return std::nullopt;
    return GridRegion::open(unite(a.cells(), b.cells()));
  }
  if (a.kind() == Kind::Open) std::swap(a, b);
  const CellSet w = unite(a.cells(), b.cells());
  if (is_subset(dilate(a.cells()), w)) return GridRegion::open(w);
  if (is_subset(dilate(b.cells()), w)) return GridRegion::closed(w);
  // Otherwise closed exactly when every boundary point of the open part lies in the closed part:
  // each face of the level-l complex with cells both in and out of T must touch S.
  const CellSet& s_cells = a.cells();
  const CellSet& t_cells = b.cells();
  std::vector<Cell> seeds = s_cells.members();
  seeds.insert(seeds.end(), t_cells.members().begin(), t_cells.members().end());
  for (const Cell& c : seeds) {
    for (std::int64_t i = 2 * c.x; i <= 2 * c.x + 2; ++i) {
      for (std::int64_t j = 2 * c.y; j <= 2 * c.y + 2; ++j) {
        bool in_t = false, out_t = false, in_s = false;
        for (std::int64_t x = (i - 1) >> 1; x <= (i >> 1); ++x) {
          for (std::int64_t y = (j - 1) >> 1; y <= (j >> 1); ++y) {
            const bool t = t_cells.contains({x, y});
            in_t = in_t || t;
            out_t = out_t || !t;
            in_s = in_s || s_cells.contains({x, y});
          }
        }
        if (in_t && out_t && !in_s) return std::nullopt;
      }
    }
  }
  return GridRegion::closed(w);
}

GridRegion set_minus_compact(const GridRegion& u, const GridRegion& k) {
  if (!u.is_open() || !k.is_compact() || !subset(k, u)) {
    throw Error(ErrorCode::Precondition, "set_minus_compact needs compact k inside open u");
  }
  if (k.is_empty()) return u;
  const int l = std::max(u.level(), k.level());
  return GridRegion::open(difference(u.cells().at_level(l), k.cells().at_level(l)));
}

ComponentList components(const GridRegion& r) {
  ComponentList out;
  const Labeling lab = label(r.cells(), r.kind() == Kind::Closed);
  for (const auto& comp : lab.bounded) {
    out.push_back({with_cells(r, CellSet(r.level(), comp)), true});
  }
  if (lab.unbounded) out.push_back({with_cells(r, *lab.unbounded), false});
  return out;
}

bool is_solid(const GridRegion& r) {
  if (!r.is_bounded()) throw Error(ErrorCode::Precondition, "is_solid needs a bounded region");
  if (r.is_empty()) return false;
  if (components(r).size() != 1) return false;
  const Labeling outside = label(r.cells().complement(), r.kind() == Kind::Open);
  return outside.bounded.empty();
}

GridRegion solid_hull(const GridRegion& r) {
  if (!r.is_bounded() || r.is_empty() || components(r).size() != 1) {
    throw Error(ErrorCode::Precondition, "solid_hull needs a nonempty bounded connected region");
  }
  const Labeling outside = label(r.cells().complement(), r.kind() == Kind::Open);
  if (outside.bounded.empty()) return r;
  std::vector<Cell> cells = r.cells().members();
  for (const auto& hole : outside.bounded) cells.insert(cells.end(), hole.begin(), hole.end());
  return with_cells(r, CellSet(r.level(), std::move(cells)));
}

namespace {

// Faces of the level-l complex in doubled coordinates: odd = open interval, even = grid line.
bool face_in_open(const CellSet& t, std::int64_t i, std::int64_t j) {
  for (std::int64_t x = (i - 1) >> 1; x <= (i >> 1); ++x) {
    for (std::int64_t y = (j - 1) >> 1; y <= (j >> 1); ++y) {
      if (!t.contains({x, y})) return false;
    }
  }
  return true;
}

}  // namespace

std::pair<GridRegion, GridRegion> halmos_split(const GridRegion& c, const GridRegion& u,
                                               const GridRegion& v, int max_depth) {
  if (!c.is_compact() || !u.is_open() || !v.is_open()) {
    throw Error(ErrorCode::Precondition, "halmos_split needs compact c and open u, v");
  }
  const int l0 = std::max({c.level(), u.level(), v.level()});
  const CellSet s = c.cells().at_level(l0);
  const CellSet t = u.cells().at_level(l0), t2 = v.cells().at_level(l0);
  for (const Cell& cell : s.members()) {
    for (std::int64_t i = 2 * cell.x; i <= 2 * cell.x + 2; ++i) {
      for (std::int64_t j = 2 * cell.y; j <= 2 * cell.y + 2; ++j) {
        if (!face_in_open(t, i, j) && !face_in_open(t2, i, j)) {
          const Rational den(std::int64_t{1} << (l0 + 1));
          const Point witness{Rational(i) / den, Rational(j) / den};
          throw Error(ErrorCode::CoverViolation, "point " + to_string(witness) + " of c is outside u and v");
        }
      }
    }
  }
  for (int m = 0; m <= max_depth; ++m) {
    const CellSet sm = s.refined(m), tm = t.refined(m), tm2 = t2.refined(m);
    std::vector<Cell> left, right;
    bool ok = true;
    for (const Cell& cell : sm.members()) {
      const auto n = neighbourhood(cell);
      if (std::all_of(n.begin(), n.end(), [&](Cell d) { return tm.contains(d); })) {
        left.push_back(cell);
      } else if (std::all_of(n.begin(), n.end(), [&](Cell d) { return tm2.contains(d); })) {
        right.push_back(cell);
      } else {
        ok = false;
        break;
      }
    }
    if (ok) {
      return {GridRegion::closed(CellSet(l0 + m, std::move(left))),
              GridRegion::closed(CellSet(l0 + m, std::move(right)))};
    }
  }
  throw Error(ErrorCode::AssignmentDepthExceeded,
              "no assignment within " + std::to_string(max_depth) + " refinements");
}

GridRegion interpolate(const GridRegion& k, const GridRegion& u) {
  if (!k.is_compact() || !u.is_open() || !subset(k, u)) {
    throw Error(ErrorCode::Precondition, "interpolate needs compact k inside open u");
  }
  if (k.is_empty()) return GridRegion::open(CellSet::empty(k.level()));
  const int l = std::max(k.level(), u.level());
  return GridRegion::open(dilate(k.cells().at_level(l + 1)));
}

// ---------------------------------------------------------------------------- text format

std::string format_region(const GridRegion& r) {
  std::ostringstream out;
  out << "level=" << r.level() << " kind=" << (r.kind() == Kind::Open ? "open" : "closed")
      << " cofinite=" << (r.cells().cofinite() ? 1 : 0) << " cells=";
  bool first = true;
  for (const Cell& c : r.cells().members()) {
    if (!first) out << ';';
    out << '(' << c.x << ',' << c.y << ')';
    first = false;
  }
  return out.str();
}

GridRegion parse_region(const std::string& line) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::ParseError, why + " in region '" + line + "'");
  };
  std::istringstream in(line);
  std::string tok;
  std::optional<int> level;
  std::optional<Kind> kind;
  std::optional<bool> cofinite;
  std::optional<std::string> cells;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw fail("token without '='");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "level") {
      try {
        std::size_t used = 0;
        level = std::stoi(val, &used);
        if (used != val.size() || *level < 0) throw fail("bad level");
      } catch (const std::logic_error&) {
        throw fail("bad level");
      }
    } else if (key == "kind") {
      if (val == "open") kind = Kind::Open;
      else if (val == "closed") kind = Kind::Closed;
      else throw fail("bad kind");
    } else if (key == "cofinite") {
      if (val != "0" && val != "1") throw fail("bad cofinite flag");
      cofinite = val == "1";
    } else if (key == "cells") {
      cells = val;
    } else {
      throw fail("unknown field '" + key + "'");
    }
  }
  if (!level || !kind || !cofinite || !cells) throw fail("missing field");
  std::vector<Cell> out;
  std::string_view rest = *cells;
  while (!rest.empty()) {
    const auto end = rest.find(';');
    std::string item(rest.substr(0, end));
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
    long long x = 0, y = 0;
    char tail = 0;
    if (std::sscanf(item.c_str(), "(%lld,%lld)%c", &x, &y, &tail) != 2) throw fail("bad cell '" + item + "'");
    out.push_back({x, y});
  }
  std::vector<Cell> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw fail("duplicate cell");
  return {CellSet(*level, std::move(out), *cofinite), *kind};
}

}  // namespace qmlab
