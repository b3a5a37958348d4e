#pragma once

// Solid-set functions and their extension to all grid regions.

#include <functional>
#include <string>
#include <utility>

#include "qmlab/measures.hpp"
#include "qmlab/variations.hpp"

namespace qmlab {

struct SolidSetFunction {
  /// Value on compact solid and bounded open solid regions.
  std::function<Rational(const GridRegion&)> q;
  /// The value assigned to the whole plane.
  Rational total;
  SetFunction::Info info;
};

/// q(A) = f(A) when p is outside A, and f(X) - f(X \ A) otherwise. Throws InfiniteTotal.
SolidSetFunction restrict_to_solid(const SetFunction& f, const Point& p);

/// Extends q by the component / hull recursion. Evaluation throws NegativeValue when an
/// intermediate value leaves [0, total].
SetFunction extend_solid(const SolidSetFunction& q);

struct Decomposition {
  SetFunction nu1;
  SetFunction nu2;
  /// Probe regions where a variation failed to stabilize (empty in strict mode).
  std::vector<GridRegion> unstable;
};

/// (extend(restrict(mu+, p)), extend(restrict(mu-, p))). The variations are evaluated with
/// `opts`; in strict mode an unstable variation on any of `probes` throws VariationUnstable.
Decomposition decompose_stm(const SetFunction& mu, const Point& p, const VariationOptions& opts,
                            const std::vector<GridRegion>& probes = {}, bool strict = false);
/// Same, from precomputed variations of `mu`; decompositions at several base points then share
/// one search cache.
Decomposition decompose_stm(const SetFunction& mu, const VariationFunctions& vf, const Point& p,
                            const std::vector<GridRegion>& probes = {}, bool strict = false);

}  // namespace qmlab
