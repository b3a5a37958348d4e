#pragma once

// Exact open and closed subsets of the plane built from dyadic cells.
//
// A cell (x, y) at level k is the closed square [x, x+1] x [y, y+1] scaled by 2^-k.
// A CellSet is either finite or cofinite at one level. Two region kinds share it:
//   CLOSED  K(S): union of the closed cells of S.
//   OPEN    U(T): points all of whose incident cells lie in T (the interior of K(T)).
// Closed regions use 8-connectivity, open regions 4-connectivity.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmlab/value.hpp"

namespace qmlab {

struct Cell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct Point {
  Rational x{0};
  Rational y{0};
  friend bool operator==(const Point&, const Point&) = default;
};

/// True when neither coordinate has a power-of-two denominator, so the point is
/// interior to exactly one cell at every level.
bool is_admissible(const Point& p);
/// Throws DyadicPoint for points on a grid line at some level.
void require_admissible(const Point& p);
/// The unique cell containing an admissible point.
Cell cell_of(const Point& p, int level);
std::string to_string(const Point& p);

/// Axis-aligned box [x0, x1] x [y0, y1] with integer corners (level-0 cell edges).
struct BoundingBox {
  std::int64_t x0 = 0;
  std::int64_t y0 = 0;
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;

  BoundingBox expanded(std::int64_t margin) const {
    return {x0 - margin, y0 - margin, x1 + margin, y1 + margin};
  }
  Rational area() const { return Rational((x1 - x0) * (y1 - y0)); }
  bool contains(Cell c, int level) const;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

BoundingBox unite(const BoundingBox& a, const BoundingBox& b);
/// Smallest integer box containing the level-0 cell of an admissible point.
BoundingBox box_around(const Point& p);

class CellSet {
 public:
  CellSet() = default;
  /// Members are sorted and deduplicated. For a cofinite set they are the excluded cells.
  CellSet(int level, std::vector<Cell> members, bool cofinite = false);

  static CellSet empty(int level) { return CellSet(level, {}, false); }
  static CellSet all(int level) { return CellSet(level, {}, true); }
  /// All cells of `box` at `level`.
  static CellSet box(int level, const BoundingBox& box);
  /// Trusts `members` to be strictly increasing already.
  static CellSet from_sorted(int level, std::vector<Cell> members, bool cofinite = false) {
    return CellSet(level, std::move(members), cofinite, Sorted{});
  }

  int level() const { return level_; }
  bool cofinite() const { return cofinite_; }
  bool finite() const { return !cofinite_; }
  const std::vector<Cell>& members() const { return members_; }
  bool is_empty() const { return !cofinite_ && members_.empty(); }
  bool is_all() const { return cofinite_ && members_.empty(); }

  bool contains(Cell c) const;
  CellSet complement() const { return CellSet(level_, members_, !cofinite_, Sorted{}); }
  CellSet refined(int steps = 1) const;
  /// Refines up to `level`; a coarser target is a Precondition error.
  CellSet at_level(int level) const;
  /// Coarsest representation of the same cells.
  CellSet coarsened() const;
  /// Cells of a finite set lying in `box`; for a cofinite set, the members of the set inside `box`.
  CellSet clipped(const BoundingBox& box) const;

  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  struct Sorted {};
  CellSet(int level, std::vector<Cell> members, bool cofinite, Sorted)
      : level_(level), cofinite_(cofinite), members_(std::move(members)) {}

  int level_ = 0;
  bool cofinite_ = false;
  std::vector<Cell> members_;
};

int common_level(const CellSet& a, const CellSet& b);
CellSet unite(const CellSet& a, const CellSet& b);
CellSet intersect(const CellSet& a, const CellSet& b);
CellSet difference(const CellSet& a, const CellSet& b);
bool is_subset(const CellSet& a, const CellSet& b);
bool intersects(const CellSet& a, const CellSet& b);
/// Some cell of `a` shares an edge with some cell of `b`.
bool four_adjacent(const CellSet& a, const CellSet& b);

/// S together with all 8-neighbours of its cells.
CellSet dilate(const CellSet& s);
/// Cells whose closed 3x3 neighbourhood lies in T.
CellSet erode(const CellSet& t);

enum class Kind : std::uint8_t { Open, Closed };

class GridRegion {
 public:
  GridRegion() = default;
  GridRegion(CellSet cells, Kind kind) : cells_(std::move(cells)), kind_(kind) {}

  static GridRegion closed(CellSet s) { return GridRegion(std::move(s), Kind::Closed); }
  static GridRegion open(CellSet t) { return GridRegion(std::move(t), Kind::Open); }
  static GridRegion empty() { return closed(CellSet::empty(0)); }
  static GridRegion whole() { return open(CellSet::all(0)); }

  const CellSet& cells() const { return cells_; }
  Kind kind() const { return kind_; }
  int level() const { return cells_.level(); }

  bool is_open() const { return kind_ == Kind::Open || is_empty() || is_whole(); }
  bool is_closed() const { return kind_ == Kind::Closed || is_empty() || is_whole(); }
  bool is_empty() const { return cells_.is_empty(); }
  bool is_whole() const { return cells_.is_all(); }
  /// Finite cell set: a compact closed region or a bounded open region.
  bool is_bounded() const { return cells_.finite(); }
  bool is_compact() const { return is_bounded() && is_closed(); }

  GridRegion refined(int steps = 1) const { return {cells_.refined(steps), kind_}; }
  GridRegion at_level(int level) const { return {cells_.at_level(level), kind_}; }
  /// Coarsest cells; the empty set is K(empty) and the plane is U(all), both at level 0.
  GridRegion canonical() const;

  /// Exact membership of an admissible point.
  bool contains(const Point& p) const;

  /// Point-set equality (levels may differ).
  friend bool operator==(const GridRegion& a, const GridRegion& b);

 private:
  CellSet cells_;
  Kind kind_ = Kind::Closed;
};

struct RegionHash {
  std::size_t operator()(const GridRegion& canonical_region) const;
};

/// Representation equality; point-set equality when both sides are canonical.
struct RegionRepEqual {
  bool operator()(const GridRegion& a, const GridRegion& b) const {
    return a.kind() == b.kind() && a.cells() == b.cells();
  }
};

GridRegion complement(const GridRegion& r);
/// K(S) in closure form; for an open region this is K(T).
GridRegion closure(const GridRegion& r);
bool subset(const GridRegion& a, const GridRegion& b);
bool disjoint(const GridRegion& a, const GridRegion& b);
/// The union of two disjoint regions when it is itself open or closed; nullopt means REJECT.
std::optional<GridRegion> disjoint_union(const GridRegion& a, const GridRegion& b);
/// U \ K for compact K inside open U.
GridRegion set_minus_compact(const GridRegion& u, const GridRegion& k);

struct Component {
  GridRegion region;
  bool bounded = true;
};
using ComponentList = std::vector<Component>;

/// Connected components, bounded ones first in order of their smallest cell.
ComponentList components(const GridRegion& r);
/// Connected with only unbounded complement components; the empty set is not solid.
bool is_solid(const GridRegion& r);
/// Fills the bounded complement components of a bounded connected region.
GridRegion solid_hull(const GridRegion& r);

/// Compacts (K, D) with K u D = c, K in u, D in v. Throws CoverViolation when c is not
/// covered and AssignmentDepthExceeded past `max_depth` refinements.
std::pair<GridRegion, GridRegion> halmos_split(const GridRegion& c, const GridRegion& u,
                                               const GridRegion& v, int max_depth = 12);

/// Bounded open V with k in V and closure(V) in u.
GridRegion interpolate(const GridRegion& k, const GridRegion& u);

/// `level=<k> kind=<open|closed> cofinite=<0|1> cells=(x,y);(x,y);...`
std::string format_region(const GridRegion& r);
/// Rejects duplicate cells and malformed fields with ParseError.
GridRegion parse_region(const std::string& line);

}  // namespace qmlab
