#include "qmlab/solid_extension.hpp"

#include <algorithm>
#include <cstdint>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

// Nesting tree of a bounded region: its components and the complementary components, linked by
// adjacency. With 8-connected closed parts and 4-connected open parts (or the reverse) the
// adjacency graph is a tree rooted at the unbounded complementary component, and the hull of a
// node is the node together with everything below it.
class NestingTree {
 public:
  explicit NestingTree(const GridRegion& a) : level_(a.level()), kind_(a.kind()) {
    const auto& cells = a.cells().members();
    std::int64_t x1 = cells.back().x, y1 = cells.front().y;
    x0_ = cells.front().x;
    y0_ = y1;
    for (const Cell& c : cells) {
      y0_ = std::min(y0_, c.y);
      y1 = std::max(y1, c.y);
    }
    // Column-major raster (x outer) so cells come out in CellSet order. One background ring
    // around the bounding box, then a sentinel ring that matches nothing.
    x0_ -= 2;
    y0_ -= 2;
    w_ = x1 - x0_ + 3;
    h_ = y1 - y0_ + 3;
    std::vector<std::uint8_t> in(static_cast<std::size_t>(w_ * h_), 0);
    for (std::int64_t x = 0; x < w_; ++x) {
      in[index_local(x, 0)] = in[index_local(x, h_ - 1)] = kSentinel;
    }
    for (std::int64_t y = 0; y < h_; ++y) {
      in[index_local(0, y)] = in[index_local(w_ - 1, y)] = kSentinel;
    }
    for (const Cell& c : cells) in[index_local(c.x - x0_, c.y - y0_)] = 1;
    id_.assign(in.size(), -1);
    const bool fg_eight = kind_ == Kind::Closed;
    // Background first so the outer component (root) gets id 0.
    flood(in, 0, !fg_eight);
    flood(in, 1, fg_eight);
    const int n = static_cast<int>(is_fg_.size());
    std::vector<std::vector<int>> adj(n);
    for (std::size_t k = 0; k + h_ < id_.size(); ++k) {
      if (id_[k] < 0) continue;
      if (id_[k + 1] >= 0) link(adj, id_[k], id_[k + 1]);
      if (id_[k + h_] >= 0) link(adj, id_[k], id_[k + h_]);
    }
    parent_.assign(n, -1);
    children_.assign(n, {});
    std::vector<int> order{0};
    std::vector<bool> seen(n, false);
    seen[0] = true;
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (int b : adj[order[k]]) {
        if (seen[b]) continue;
        seen[b] = true;
        parent_[b] = order[k];
        children_[order[k]].push_back(b);
        order.push_back(b);
      }
    }
    // Every cell goes to its node and to all ancestors below the root, in raster (sorted) order.
    hull_.assign(n, {});
    for (std::int64_t x = 1; x + 1 < w_; ++x) {
      for (std::int64_t y = 1; y + 1 < h_; ++y) {
        for (int node = id_[index_local(x, y)]; node > 0; node = parent_[node]) {
          hull_[node].push_back({x + x0_, y + y0_});
        }
      }
    }
  }

  int size() const { return static_cast<int>(is_fg_.size()); }
  bool foreground(int node) const { return is_fg_[node]; }
  const std::vector<int>& children(int node) const { return children_[node]; }
  GridRegion hull(int node) const {
    const Kind k = is_fg_[node] ? kind_ : (kind_ == Kind::Closed ? Kind::Open : Kind::Closed);
    return GridRegion(CellSet::from_sorted(level_, hull_[node]), k);
  }

 private:
  static constexpr std::uint8_t kSentinel = 2;

  std::size_t index_local(std::int64_t x, std::int64_t y) const { return static_cast<std::size_t>(x * h_ + y); }

  void flood(const std::vector<std::uint8_t>& in, std::uint8_t value, bool eight) {
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(h_);
    const std::ptrdiff_t four[] = {1, -1, h, -h};
    const std::ptrdiff_t all[] = {1, -1, h, -h, h + 1, h - 1, -h + 1, -h - 1};
    const std::ptrdiff_t* steps = eight ? all : four;
    const int nsteps = eight ? 8 : 4;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < in.size(); ++start) {
      if (in[start] != value || id_[start] >= 0) continue;
      const int label = static_cast<int>(is_fg_.size());
      is_fg_.push_back(value == 1);
      id_[start] = label;
      stack.push_back(start);
      while (!stack.empty()) {
        const std::size_t k = stack.back();
        stack.pop_back();
        for (int s = 0; s < nsteps; ++s) {
          const std::size_t nk = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + steps[s]);
          if (in[nk] == value && id_[nk] < 0) {
            id_[nk] = label;
            stack.push_back(nk);
          }
        }
      }
    }
  }

  static void link(std::vector<std::vector<int>>& adj, int a, int b) {
    if (a == b) return;
    if (std::find(adj[a].begin(), adj[a].end(), b) == adj[a].end()) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }

  int level_;
  Kind kind_;
  std::int64_t x0_ = 0, y0_ = 0, w_ = 0, h_ = 0;
  std::vector<int> id_;
  std::vector<bool> is_fg_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<Cell>> hull_;
};

class Extension {
 public:
  explicit Extension(const SolidSetFunction& q) : q_(q) {}

  Rational operator()(const GridRegion& a) const {
    if (a.is_empty()) return Rational(0);
    if (a.is_whole()) return q_.total;
    if (!a.is_bounded()) return checked(q_.total - (*this)(complement(a)), a);
    // Each component C contributes q(hull C) minus q of the hulls of its bounded complementary
    // components; those hulls are solid.
    const NestingTree tree(a);
    Rational sum(0);
    for (int node = 1; node < tree.size(); ++node) {
      if (!tree.foreground(node)) continue;
      const GridRegion hull = tree.hull(node);
      Rational v = q_.q(hull);
      for (int hole : tree.children(node)) v -= q_.q(tree.hull(hole));
      sum += checked(v, hull);
    }
    return checked(sum, a);
  }

 private:
  Rational checked(const Rational& v, const GridRegion& a) const {
    if (v < Rational(0) || v > q_.total) {
      throw Error(ErrorCode::NegativeValue,
                  "extension of " + q_.info.name + " gives " + to_string(v) + " on " + format_region(a));
    }
    return v;
  }

  SolidSetFunction q_;
};

}  // namespace

SolidSetFunction restrict_to_solid(const SetFunction& f, const Point& p) {
  require_admissible(p);
  const ExtendedValue whole = f(GridRegion::whole());
  if (!whole.is_finite()) {
    throw Error(ErrorCode::InfiniteTotal, f.name() + " is infinite on the plane");
  }
  SolidSetFunction out;
  out.total = whole.finite();
  out.info = f.info();
  out.info.name = "solid(" + f.name() + "," + to_string(p) + ")";
  const Rational total = out.total;
  out.q = [f, p, total](const GridRegion& a) {
    if (!a.contains(p)) return f(a).finite();
    return total - f(complement(a)).finite();
  };
  return out;
}

SetFunction extend_solid(const SolidSetFunction& q) {
  SetFunction::Info info = q.info;
  const Extension ext(q);
  return SetFunction(std::move(info), [ext](const GridRegion& r) { return ExtendedValue(ext(r)); });
}

Decomposition decompose_stm(const SetFunction& mu, const Point& p, const VariationOptions& opts,
                            const std::vector<GridRegion>& probes, bool strict) {
  return decompose_stm(mu, variation_functions(mu, opts), p, probes, strict);
}

Decomposition decompose_stm(const SetFunction& mu, const VariationFunctions& vf, const Point& p,
                            const std::vector<GridRegion>& probes, bool strict) {
  Decomposition out;
  for (const GridRegion& r : probes) {
    const Variations v = vf.details(r);
    if (v.plus.stabilized && v.minus.stabilized) continue;
    if (strict) {
      throw Error(ErrorCode::VariationUnstable, "variations of " + mu.name() + " unstable on " + format_region(r));
    }
    out.unstable.push_back(r);
  }
  SolidSetFunction q1 = restrict_to_solid(vf.plus, p);
  SolidSetFunction q2 = restrict_to_solid(vf.minus, p);
  q1.info.name = "nu1(" + mu.name() + "," + to_string(p) + ")";
  q2.info.name = "nu2(" + mu.name() + "," + to_string(p) + ")";
  q1.info.claimed = q2.info.claimed = FunctionClass::TM;
  out.nu1 = extend_solid(q1);
  out.nu2 = extend_solid(q2);
  return out;
}

}  // namespace qmlab
