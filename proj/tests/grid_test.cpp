#include <random>

#include <gtest/gtest.h>

#include "qmlab/error.hpp"
#include "qmlab/grid.hpp"
#include "support/sampling_oracle.hpp"

namespace qmlab {
namespace {

using testing::SampleLattice;

CellSet cells(int level, std::vector<Cell> c) { return CellSet(level, std::move(c)); }
CellSet block(int level, std::int64_t x0, std::int64_t y0, std::int64_t w, std::int64_t h) {
  std::vector<Cell> c;
  for (std::int64_t x = x0; x < x0 + w; ++x) {
    for (std::int64_t y = y0; y < y0 + h; ++y) c.push_back({x, y});
  }
  return CellSet(level, std::move(c));
}
CellSet ring3(std::int64_t x0, std::int64_t y0) {
  return difference(block(0, x0, y0, 3, 3), cells(0, {{x0 + 1, y0 + 1}}));
}

GridRegion random_region(std::mt19937_64& rng, bool allow_cofinite = true) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> coord(0, 4);
  std::uniform_int_distribution<int> count(0, 8);
  std::vector<Cell> c;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) c.push_back({coord(rng), coord(rng)});
  const int level = coin(rng);
  const bool cof = allow_cofinite && coin(rng) && coin(rng);
  return {CellSet(level, std::move(c), cof), coin(rng) ? Kind::Open : Kind::Closed};
}

GridRegion random_connected_compact(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> steps(1, 14);
  std::uniform_int_distribution<int> dir(0, 7);
  const int dx[] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dy[] = {0, 0, 1, -1, 1, -1, 1, -1};
  std::vector<Cell> c{{0, 0}};
  Cell cur{0, 0};
  const int n = steps(rng);
  for (int k = 0; k < n; ++k) {
    const int d = dir(rng);
    cur = {cur.x + dx[d], cur.y + dy[d]};
    c.push_back(cur);
  }
  return GridRegion::closed(CellSet(0, std::move(c)));
}

TEST(CellSet, ComplementTogglesFlagAndKeepsMembers) {
  const CellSet s = cells(2, {{1, 1}, {0, 3}});
  const CellSet c = s.complement();
  EXPECT_TRUE(c.cofinite());
  EXPECT_EQ(c.members(), s.members());
  EXPECT_EQ(c.complement(), s);
}

TEST(CellSet, RefinementHasFourChildrenPerCell) {
  const CellSet s = cells(0, {{0, 0}, {-1, 2}});
  EXPECT_EQ(s.refined().members().size(), 8u);
  EXPECT_EQ(s.refined(2).coarsened(), s);
  EXPECT_EQ(CellSet(3, {}, true).coarsened(), CellSet::all(0));
}

TEST(CellSet, ErodeAndDilate) {
  EXPECT_EQ(erode(block(0, 0, 0, 3, 3)), cells(0, {{1, 1}}));
  EXPECT_EQ(dilate(cells(0, {{0, 0}})), block(0, -1, -1, 3, 3));
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const CellSet s = random_region(rng).cells();
    EXPECT_TRUE(is_subset(s, erode(dilate(s))));
    EXPECT_TRUE(is_subset(erode(s), s));
  }
}

TEST(GridRegion, ComplementDualityExamples) {
  const GridRegion k = GridRegion::closed(cells(0, {{0, 0}}));
  const GridRegion c = complement(k);
  EXPECT_EQ(c.kind(), Kind::Open);
  EXPECT_TRUE(c.cells().cofinite());
  EXPECT_EQ(c.cells().members(), (std::vector<Cell>{{0, 0}}));
  EXPECT_TRUE(complement(GridRegion::whole()).is_empty());
}

TEST(GridRegion, ComplementIsAnInvolutionAndNegatesMembership) {
  std::mt19937_64 rng(11);
  const SampleLattice lattice({0, 0, 5, 5}, 2, 3);
  for (int k = 0; k < 100; ++k) {
    const GridRegion r = random_region(rng);
    EXPECT_EQ(complement(complement(r)), r);
    const auto a = lattice.sample(r), b = lattice.sample(complement(r));
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NE(a[i], b[i]);
  }
}

TEST(GridRegion, SubsetExamples) {
  const GridRegion k = GridRegion::closed(cells(0, {{1, 1}}));
  EXPECT_TRUE(subset(k, GridRegion::open(block(0, 0, 0, 3, 3))));
  EXPECT_FALSE(subset(k, GridRegion::open(cells(0, {{1, 1}}))));
  EXPECT_TRUE(subset(k, k));
  // Agrees with sampling at level + 2.
  const SampleLattice lattice({0, 0, 3, 3}, 2, 2);
  EXPECT_TRUE(testing::sampled_subset(lattice.sample(k), lattice.sample(GridRegion::open(block(0, 0, 0, 3, 3)))));
  EXPECT_FALSE(testing::sampled_subset(lattice.sample(k), lattice.sample(GridRegion::open(cells(0, {{1, 1}})))));
}

TEST(GridRegion, DisjointExamples) {
  const CellSet diag = cells(0, {{0, 0}});
  const CellSet diag2 = cells(0, {{1, 1}});
  EXPECT_FALSE(disjoint(GridRegion::closed(diag), GridRegion::closed(diag2)));
  EXPECT_TRUE(disjoint(GridRegion::open(diag), GridRegion::open(diag2)));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const GridRegion r = random_region(rng);
    EXPECT_TRUE(disjoint(r, complement(r)));
  }
}

TEST(GridRegion, DisjointUnionExamples) {
  const auto two = disjoint_union(GridRegion::closed(cells(0, {{0, 0}})), GridRegion::closed(cells(0, {{3, 0}})));
  ASSERT_TRUE(two);
  EXPECT_EQ(*two, GridRegion::closed(cells(0, {{0, 0}, {3, 0}})));

  EXPECT_FALSE(disjoint_union(GridRegion::open(cells(0, {{0, 0}})), GridRegion::open(cells(0, {{1, 0}}))));

  const GridRegion u = GridRegion::open(block(0, 0, 0, 5, 5));
  const GridRegion k = GridRegion::closed(block(0, 1, 1, 2, 2));
  const auto back = disjoint_union(k, set_minus_compact(u, k));
  ASSERT_TRUE(back);
  EXPECT_EQ(*back, u);
}

TEST(GridRegion, DisjointUnionIsCommutativeAndAssociative) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int k = 0; k < 3000; ++k) {
    const GridRegion a = random_region(rng, false), b = random_region(rng, false), c = random_region(rng, false);
    if (!disjoint(a, b) || !disjoint(b, c) || !disjoint(a, c)) continue;
    const auto ab = disjoint_union(a, b), ba = disjoint_union(b, a);
    ASSERT_EQ(ab.has_value(), ba.has_value());
    if (ab) EXPECT_EQ(*ab, *ba);
    const auto bc = disjoint_union(b, c);
    if (!ab || !bc) continue;
    const auto left = disjoint_union(*ab, c), right = disjoint_union(a, *bc);
    if (left && right) {
      EXPECT_EQ(*left, *right);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(GridRegion, SetMinusCompact) {
  const GridRegion u = GridRegion::open(block(0, 0, 0, 5, 5));
  EXPECT_EQ(set_minus_compact(u, GridRegion::empty()), u);
  const GridRegion k = GridRegion::closed(cells(0, {{2, 2}}));
  const GridRegion d = set_minus_compact(u, k);
  EXPECT_EQ(d.cells().members().size(), 24u);
  const SampleLattice lattice({0, 0, 5, 5}, 1, 2);
  const auto su = lattice.sample(u), sk = lattice.sample(k), sd = lattice.sample(d);
  for (std::size_t i = 0; i < su.size(); ++i) EXPECT_EQ(sd[i], su[i] && !sk[i]);
  EXPECT_THROW(set_minus_compact(GridRegion::open(cells(0, {{2, 2}})), k), Error);
}

TEST(GridRegion, ComponentsUseKindConnectivity) {
  const CellSet diag = cells(0, {{0, 0}, {1, 1}});
  EXPECT_EQ(components(GridRegion::closed(diag)).size(), 1u);
  EXPECT_EQ(components(GridRegion::open(diag)).size(), 2u);
  EXPECT_TRUE(components(GridRegion::empty()).empty());

  // Complement of a closed ring: one bounded hole plus the unbounded outside.
  const auto outside = components(complement(GridRegion::closed(ring3(0, 0))));
  ASSERT_EQ(outside.size(), 2u);
  EXPECT_TRUE(outside[0].bounded);
  EXPECT_EQ(outside[0].region, GridRegion::open(cells(0, {{1, 1}})));
  EXPECT_FALSE(outside[1].bounded);
}

TEST(GridRegion, SolidityAndHull) {
  EXPECT_TRUE(is_solid(GridRegion::closed(cells(0, {{0, 0}}))));
  const GridRegion ring = GridRegion::closed(ring3(0, 0));
  EXPECT_FALSE(is_solid(ring));
  EXPECT_EQ(solid_hull(ring), GridRegion::closed(block(0, 0, 0, 3, 3)));
  EXPECT_TRUE(is_solid(solid_hull(ring)));
  const GridRegion bar = GridRegion::closed(block(0, 0, 0, 4, 1));
  EXPECT_EQ(solid_hull(bar), bar);
  EXPECT_THROW(is_solid(GridRegion::whole()), Error);
  // A diagonal pair of open cells is disconnected, hence not solid.
  EXPECT_FALSE(is_solid(GridRegion::open(cells(0, {{0, 0}, {1, 1}}))));
}

TEST(GridRegion, HullPropertyOnRandomConnectedCompacts) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 200; ++k) {
    const GridRegion c = random_connected_compact(rng);
    ASSERT_EQ(components(c).size(), 1u);
    const GridRegion h = solid_hull(c);
    EXPECT_TRUE(is_solid(h));
    EXPECT_TRUE(subset(c, h));
    // c together with its bounded holes is exactly the hull.
    // Holes may touch each other diagonally, so they are added as one open set.
    CellSet holes = CellSet::empty(0);
    for (const auto& comp : components(complement(c))) {
      if (comp.bounded) holes = unite(holes, comp.region.cells());
    }
    const auto acc = disjoint_union(c, GridRegion::open(holes));
    ASSERT_TRUE(acc);
    EXPECT_EQ(*acc, h);
  }
}

TEST(GridRegion, HalmosSplitExamples) {
  const GridRegion c = GridRegion::closed(block(0, 1, 1, 1, 1));
  const auto [k, d] = halmos_split(c, GridRegion::open(block(0, 0, 0, 3, 3)), GridRegion::empty());
  EXPECT_EQ(k, c);
  EXPECT_TRUE(d.is_empty());

  const GridRegion bar = GridRegion::closed(block(0, 0, 1, 6, 1));
  const GridRegion left = GridRegion::open(block(0, -1, 0, 5, 3));
  const GridRegion right = GridRegion::open(block(0, 2, 0, 5, 3));
  const auto [kb, db] = halmos_split(bar, left, right);
  EXPECT_TRUE(subset(kb, left));
  EXPECT_TRUE(subset(db, right));
  EXPECT_EQ(GridRegion::closed(unite(kb.cells(), db.cells())), bar);
  EXPECT_FALSE(kb.is_empty());
  EXPECT_FALSE(db.is_empty());
}

TEST(GridRegion, HalmosSplitCoverViolation) {
  const GridRegion bar = GridRegion::closed(block(0, 0, 0, 2, 1));
  try {
    halmos_split(bar, GridRegion::open(cells(0, {{0, 0}})), GridRegion::open(cells(0, {{1, 0}})));
    FAIL() << "expected COVER_VIOLATION";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoverViolation);
  }
}

TEST(GridRegion, InterpolateExamples) {
  EXPECT_TRUE(interpolate(GridRegion::empty(), GridRegion::open(block(0, 0, 0, 2, 2))).is_empty());
  const GridRegion k = GridRegion::closed(cells(0, {{2, 2}}));
  const GridRegion u = GridRegion::open(block(0, 0, 0, 5, 5));
  const GridRegion v = interpolate(k, u);
  EXPECT_EQ(v.level(), 1);
  EXPECT_EQ(v.cells().members().size(), 16u);  // half-cell collar around the 2x2 children
  EXPECT_TRUE(subset(k, v));
  EXPECT_TRUE(subset(closure(v), u));
  EXPECT_TRUE(closure(v).is_compact());
}

TEST(GridRegion, RefinementInvariance) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 300; ++k) {
    const GridRegion a = random_region(rng), b = random_region(rng);
    EXPECT_EQ(subset(a, b), subset(a.refined(), b.refined(2)));
    EXPECT_EQ(disjoint(a, b), disjoint(a.refined(2), b));
    EXPECT_EQ(components(a).size(), components(a.refined()).size());
    EXPECT_EQ(a, a.refined(2));
  }
}

TEST(GridRegion, ErosionChainExhaustsOpenRegion) {
  const GridRegion u = GridRegion::open(cells(0, {{0, 0}, {1, 0}, {1, 1}}));
  const GridRegion target = GridRegion::closed(CellSet(3, {{4, 5}, {12, 4}, {13, 13}}));
  ASSERT_TRUE(subset(target, u));
  bool contained = false;
  GridRegion prev = GridRegion::empty();
  for (int m = 0; m <= 4; ++m) {
    const GridRegion km = GridRegion::closed(erode(u.cells().refined(m)));
    EXPECT_TRUE(subset(prev, km));
    EXPECT_TRUE(subset(km, u));
    if (subset(target, km)) contained = true;
    prev = km;
  }
  EXPECT_TRUE(contained);
}

TEST(RegionText, FormatAndParse) {
  const GridRegion r = GridRegion::open(CellSet(2, {{1, 0}, {-1, 3}}, true));
  const std::string line = format_region(r);
  EXPECT_EQ(line, "level=2 kind=open cofinite=1 cells=(-1,3);(1,0)");
  const GridRegion back = parse_region(line);
  EXPECT_TRUE(RegionRepEqual{}(back, r));
  EXPECT_TRUE(parse_region("level=0 kind=closed cofinite=0 cells=").is_empty());
  EXPECT_THROW(parse_region("level=0 kind=closed cofinite=0 cells=(1,1);(1,1)"), Error);
  EXPECT_THROW(parse_region("level=0 kind=ajar cofinite=0 cells="), Error);
  EXPECT_THROW(parse_region("level=0 kind=open cells="), Error);
}

TEST(Points, AdmissibilityAndCells) {
  const Point p{Rational(1, 3), Rational(2, 3)};
  EXPECT_TRUE(is_admissible(p));
  EXPECT_EQ(cell_of(p, 0), (Cell{0, 0}));
  EXPECT_EQ(cell_of(p, 2), (Cell{1, 2}));
  EXPECT_EQ(cell_of(Point{Rational(-1, 3), Rational(7, 6)}, 1), (Cell{-1, 2}));
  EXPECT_FALSE(is_admissible(Point{Rational(1, 2), Rational(1, 3)}));
  EXPECT_FALSE(is_admissible(Point{Rational(1), Rational(1, 3)}));
  EXPECT_THROW(require_admissible(Point{Rational(1, 4), Rational(1, 3)}), Error);
}

}  // namespace
}  // namespace qmlab
