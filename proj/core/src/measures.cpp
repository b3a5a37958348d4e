#include "qmlab/measures.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "qmlab/error.hpp"
#include "qmlab/solid_extension.hpp"

namespace qmlab {

std::string_view to_string(FunctionClass c) {
  switch (c) {
    case FunctionClass::Measure: return "MEASURE";
    case FunctionClass::TM: return "TM";
    case FunctionClass::DTM: return "DTM";
    case FunctionClass::STM: return "STM";
    case FunctionClass::SDTM: return "SDTM";
    case FunctionClass::Unknown: break;
  }
  return "UNKNOWN";
}

namespace {

// Regions above this many cells are evaluated but not cached.
constexpr std::size_t kCacheCellLimit = 128;
constexpr std::size_t kCacheEntryLimit = std::size_t{1} << 18;

std::string point_list(const std::vector<Point>& ps) {
  std::string out;
  for (const Point& p : ps) {
    if (!out.empty()) out += ",";
    out += to_string(p);
  }
  return out;
}

std::int64_t count_points(const GridRegion& r, const std::vector<Point>& ps) {
  return std::count_if(ps.begin(), ps.end(), [&](const Point& p) { return r.contains(p); });
}

void require_general_position(const std::vector<Point>& ps) {
  for (const Point& p : ps) require_admissible(p);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (ps[i] == ps[j]) throw Error(ErrorCode::Precondition, "points must be distinct");
    }
  }
}

}  // namespace

struct SetFunction::State {
  Evaluator eval;
  std::mutex mutex;
  std::unordered_map<GridRegion, ExtendedValue, RegionHash, RegionRepEqual> cache;
};

SetFunction::SetFunction(Info info, Evaluator eval)
    : info_(std::make_shared<const Info>(std::move(info))), state_(std::make_shared<State>()) {
  state_->eval = std::move(eval);
}

ExtendedValue SetFunction::operator()(const GridRegion& r) const {
  const GridRegion c = r.canonical();
  const bool cacheable = c.cells().members().size() <= kCacheCellLimit;
  if (cacheable) {
    std::lock_guard lock(state_->mutex);
    if (auto it = state_->cache.find(c); it != state_->cache.end()) return it->second;
  }
  const ExtendedValue v = state_->eval(c);
  if (cacheable) {
    std::lock_guard lock(state_->mutex);
    if (state_->cache.size() < kCacheEntryLimit) state_->cache.emplace(c, v);
  }
  return v;
}

ExtendedValue SetFunction::evaluate_uncached(const GridRegion& r) const { return state_->eval(r); }

BoundingBox window_around(const std::vector<Point>& points, std::int64_t margin) {
  if (points.empty()) return {};
  BoundingBox b = box_around(points.front());
  for (const Point& p : points) b = unite(b, box_around(p));
  return b.expanded(margin);
}

SetFunction point_mass(const Point& p, const Rational& w) {
  require_admissible(p);
  SetFunction::Info info;
  info.name = "delta" + to_string(p) + (w == Rational(1) ? "" : "*" + to_string(w));
  info.claimed = w > Rational(0) ? FunctionClass::Measure : FunctionClass::Unknown;
  info.window = window_around({p}, 0);
  info.atoms = {p};
  return SetFunction(std::move(info), [p, w](const GridRegion& r) {
    return ExtendedValue(r.contains(p) ? w : Rational(0));
  });
}

namespace {

Rational cell_area(std::int64_t count, int level) {
  return Rational(count, std::int64_t{1} << (2 * level));
}

}  // namespace

SetFunction windowed_area(const BoundingBox& w) {
  SetFunction::Info info;
  info.name = "area[" + std::to_string(w.x0) + "," + std::to_string(w.y0) + "," + std::to_string(w.x1) + "," +
              std::to_string(w.y1) + "]";
  info.claimed = FunctionClass::Measure;
  info.window = w;
  return SetFunction(std::move(info), [w](const GridRegion& r) {
    const CellSet inside = r.cells().clipped(w);
    return ExtendedValue(cell_area(static_cast<std::int64_t>(inside.members().size()), r.level()));
  });
}

SetFunction unbounded_area() {
  SetFunction::Info info;
  info.name = "area";
  info.claimed = FunctionClass::Measure;
  info.infinity = InfinitySign::Pos;
  return SetFunction(std::move(info), [](const GridRegion& r) {
    if (!r.is_bounded()) return ExtendedValue::pos_inf();
    return ExtendedValue(cell_area(static_cast<std::int64_t>(r.cells().members().size()), r.level()));
  });
}

SetFunction maj3(const Point& p1, const Point& p2, const Point& p3) {
  const std::vector<Point> ps{p1, p2, p3};
  require_general_position(ps);
  SolidSetFunction q;
  q.total = Rational(1);
  q.q = [ps](const GridRegion& a) { return Rational(count_points(a, ps) >= 2 ? 1 : 0); };
  q.info.name = "maj3(" + point_list(ps) + ")";
  q.info.claimed = FunctionClass::TM;
  q.info.window = window_around(ps, 1);
  q.info.atoms = ps;
  return extend_solid(q);
}

SetFunction linked_pair(const Point& p1, const Point& p2, const Point& p3) {
  const std::vector<Point> ps{p1, p2, p3};
  require_general_position(ps);
  SetFunction::Info info;
  info.name = "linked_pair(" + point_list(ps) + ")";
  info.claimed = FunctionClass::DTM;
  info.window = window_around(ps, 1);
  info.atoms = ps;
  return SetFunction(std::move(info), [ps](const GridRegion& r) {
    if (count_points(r, ps) < 2) return ExtendedValue(0);
    for (const Component& c : components(r)) {
      if (count_points(c.region, ps) >= 2) return ExtendedValue(1);
    }
    return ExtendedValue(0);
  });
}

SetFunction naive_majority(const Point& p1, const Point& p2, const Point& p3) {
  const std::vector<Point> ps{p1, p2, p3};
  require_general_position(ps);
  SetFunction::Info info;
  info.name = "naive_majority(" + point_list(ps) + ")";
  info.window = window_around(ps, 1);
  info.atoms = ps;
  return SetFunction(std::move(info), [ps](const GridRegion& r) {
    return ExtendedValue(count_points(r, ps) >= 2 ? 1 : 0);
  });
}

SetFunction linear_combination(const std::vector<Rational>& coeffs, const std::vector<SetFunction>& fns) {
  if (coeffs.size() != fns.size() || fns.empty()) {
    throw Error(ErrorCode::Precondition, "linear_combination needs matching nonempty coefficient and part lists");
  }
  SetFunction::Info info;
  bool pos = false, neg = false, windowed = true;
  BoundingBox window;
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const SetFunction& f = fns[i];
    if (!info.name.empty()) info.name += " + ";
    info.name += to_string(coeffs[i]) + "*" + f.name();
    if (coeffs[i] != Rational(0) && f.infinity_sign() != InfinitySign::None) {
      const bool up = (f.infinity_sign() == InfinitySign::Pos) == (coeffs[i] > Rational(0));
      (up ? pos : neg) = true;
    }
    if (f.window()) {
      window = i == 0 ? *f.window() : unite(window, *f.window());
    } else {
      windowed = false;
    }
    for (const Point& p : f.atoms()) {
      if (std::find(info.atoms.begin(), info.atoms.end(), p) == info.atoms.end()) info.atoms.push_back(p);
    }
  }
  if (pos && neg) throw Error(ErrorCode::InfConflict, "parts of " + info.name + " carry opposite infinities");
  info.infinity = pos ? InfinitySign::Pos : neg ? InfinitySign::Neg : InfinitySign::None;
  if (windowed) info.window = window;
  return SetFunction(std::move(info), [coeffs, fns](const GridRegion& r) {
    ExtendedValue sum(0);
    for (std::size_t i = 0; i < fns.size(); ++i) {
      if (coeffs[i] == Rational(0)) continue;
      sum += coeffs[i] * fns[i].evaluate_uncached(r);
    }
    return sum;
  });
}

SetFunction zero_function() {
  SetFunction::Info info;
  info.name = "zero";
  info.claimed = FunctionClass::Measure;
  info.window = BoundingBox{};
  return SetFunction(std::move(info), [](const GridRegion&) { return ExtendedValue(0); });
}

}  // namespace qmlab
