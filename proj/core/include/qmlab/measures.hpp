#pragma once

// Set functions on grid regions and the gallery of concrete examples.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qmlab/grid.hpp"
#include "qmlab/value.hpp"

namespace qmlab {

enum class FunctionClass : std::uint8_t { Measure, TM, DTM, STM, SDTM, Unknown };
enum class InfinitySign : std::uint8_t { None, Pos, Neg };

std::string_view to_string(FunctionClass c);

/// An extended-real valued function on grid regions. Copies share the evaluator and its cache.
class SetFunction {
 public:
  using Evaluator = std::function<ExtendedValue(const GridRegion&)>;

  struct Info {
    std::string name;
    FunctionClass claimed = FunctionClass::Unknown;
    /// Box outside which the function is inert; absent for functions with unbounded support.
    std::optional<BoundingBox> window;
    InfinitySign infinity = InfinitySign::None;
    /// Points the function is concentrated around (used to shape variation searches).
    std::vector<Point> atoms;
  };

  SetFunction() = default;
  SetFunction(Info info, Evaluator eval);

  /// Evaluates on the canonical form of `r`; small regions are cached.
  ExtendedValue operator()(const GridRegion& r) const;
  /// Bypasses the cache. `r` need not be canonical.
  ExtendedValue evaluate_uncached(const GridRegion& r) const;

  const Info& info() const { return *info_; }
  const std::string& name() const { return info_->name; }
  FunctionClass claimed_class() const { return info_->claimed; }
  const std::optional<BoundingBox>& window() const { return info_->window; }
  InfinitySign infinity_sign() const { return info_->infinity; }
  const std::vector<Point>& atoms() const { return info_->atoms; }

 private:
  struct State;
  std::shared_ptr<const Info> info_;
  std::shared_ptr<State> state_;
};

/// w times the unit mass at an admissible point p.
SetFunction point_mass(const Point& p, const Rational& w = Rational(1));
/// Lebesgue area of the part of a region inside `w`.
SetFunction windowed_area(const BoundingBox& w);
/// Lebesgue area; unbounded regions evaluate to +inf.
SetFunction unbounded_area();
/// The simple quasi-measure that is 1 on solids holding at least two of the three points.
SetFunction maj3(const Point& p1, const Point& p2, const Point& p3);
/// 1 when some connected component of the region holds at least two of the points.
SetFunction linked_pair(const Point& p1, const Point& p2, const Point& p3);
/// 1 when the region holds at least two of the points, with no regard to shape.
SetFunction naive_majority(const Point& p1, const Point& p2, const Point& p3);
/// Pointwise sum of c_i f_i. Throws InfConflict when the parts can produce opposite infinities.
SetFunction linear_combination(const std::vector<Rational>& coeffs, const std::vector<SetFunction>& fns);
/// The constant-zero function.
SetFunction zero_function();

/// Minimal box containing the level-0 cells of the points, grown by `margin`.
BoundingBox window_around(const std::vector<Point>& points, std::int64_t margin);

}  // namespace qmlab
