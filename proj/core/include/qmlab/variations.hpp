#pragma once

// Positive, negative and total variations of a set function, computed by exhaustive search over
// grid compacts, plus the two independent total-variation oracles on explicit cell pools.

#include <functional>
#include <vector>

#include "qmlab/measures.hpp"

namespace qmlab {

struct VariationOptions {
  /// Finest cell level searched. Regions at or below it still get one refinement step.
  int level_cap = 3;
  /// Closed sets: infimum over U(dilate(refine^j S)) for j = 0..dilation_depth.
  int dilation_depth = 2;
  /// Maximum number of search pieces per level (2^budget subsets).
  int budget = 18;
};

struct VariationResult {
  ExtendedValue value;
  /// plus / minus: the maximizing compact. total: the positive group, then the negative group.
  std::vector<GridRegion> witness;
  int level_cap = 0;
  bool stabilized = false;
  /// Running value after each searched level (open sets) or per dilation step (closed sets).
  std::vector<ExtendedValue> by_level;
};

struct Variations {
  VariationResult plus;
  VariationResult minus;
  VariationResult total;
};

/// One search pass computing all three variations of f on `a`.
Variations variations(const SetFunction& f, const GridRegion& a, const VariationOptions& opts = {});
VariationResult variation_plus(const SetFunction& f, const GridRegion& a, const VariationOptions& opts = {});
VariationResult variation_minus(const SetFunction& f, const GridRegion& a, const VariationOptions& opts = {});
VariationResult total_variation(const SetFunction& f, const GridRegion& a, const VariationOptions& opts = {});

/// f+, f- and |f| as set functions sharing one cache of full search results.
struct VariationFunctions {
  SetFunction plus;
  SetFunction minus;
  SetFunction total;
  std::function<Variations(const GridRegion&)> details;
};
VariationFunctions variation_functions(const SetFunction& f, const VariationOptions& opts = {});

/// Max over subsets S of `pool` of the sum of |f| over the 8-components of K(S).
ExtendedValue grouped_total_variation(const SetFunction& f, const CellSet& pool, int budget = 18);
/// Max over families of pairwise disjoint compacts K(S_i), S_i partitioning a subset of `pool`,
/// of the sum of |f(K(S_i))|. Enumerates set partitions directly.
ExtendedValue naive_total_variation(const SetFunction& f, const CellSet& pool, int budget = 10);

struct NormPair {
  /// sup |f(K)| over compacts, as max(f+(X), f-(X)).
  ExtendedValue norm1;
  /// |f|(X).
  ExtendedValue norm2;
  bool stabilized = false;
};
/// Requires a support window.
NormPair norms(const SetFunction& f, const VariationOptions& opts = {});

}  // namespace qmlab
