#pragma once

// Axiom suites, limit checks and the Jordan-type decomposition over finite probe families.
//
// A PASS means no violation was found on the probes; FAIL always carries a witness that
// replay() re-verifies; INCONCLUSIVE marks limits that had not settled at the depth cap.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qmlab/measures.hpp"
#include "qmlab/variations.hpp"

namespace qmlab {

struct ProbeOptions {
  /// Every cell subset of this box at `exhaustive_level` is a probe (both kinds) when the box
  /// has at most 16 cells there.
  BoundingBox window{0, 0, 3, 3};
  int exhaustive_level = 0;
  int random_count = 0;
  /// Random probes draw cells from this box; an empty box means `window`.
  BoundingBox random_window{};
  int random_level = 0;
  std::uint64_t seed = 1;
  /// Depth of erosion / dilation / chain refinements for limit checks.
  int refinement_depth = 3;
  /// Limit chains never refine past this level.
  int max_chain_level = 6;
  /// Pair-based checks sample this many pairs when the full product is larger.
  std::size_t pair_limit = 300000;
  /// Number of random increasing open chains per function in the tau-smoothness check.
  int chain_count = 200;
  /// Adds X, the empty set, the window (both kinds) and a few shapes around the atoms.
  bool structured = true;
  std::vector<GridRegion> extra;
};

/// A deterministic, deduplicated list of probe regions.
class ProbeFamily {
 public:
  explicit ProbeFamily(ProbeOptions opts = {}, const std::vector<Point>& atoms = {});
  const ProbeOptions& options() const { return opts_; }
  const std::vector<GridRegion>& regions() const { return regions_; }
  std::vector<GridRegion> compacts() const;
  std::vector<GridRegion> bounded_opens() const;
  std::vector<GridRegion> opens() const;

 private:
  ProbeOptions opts_;
  std::vector<GridRegion> regions_;
};

enum class Verdict : std::uint8_t { Pass, Fail, Inconclusive };
std::string_view to_string(Verdict v);

/// A replayable observation. `relation` names what the values violate:
///   additive    regions A_1..A_n, U (their disjoint union); values f(A_i), f(U)
///   modular     regions U, V, U u V, U n V; values f of each
///   negative    region A; value f(A)
///   limit       regions A, R_0..R_d (approximants); values f of each
///   jordan      region A; values f(A), f+(A), f-(A), |f|(A)
///   dominates   region A; values g(A), f(A) where g >= f was required
///   norm        no regions; values norm1, norm2
///   small_sets  regions U, C, A, B (finest candidate C, worst pair C in A in B in U);
///               values eps, |f|(U \ C), |f(A) - f(B)|
///   differs     region A; values f(A), g(A) for a function g required to agree with f
struct Witness {
  std::string relation;
  std::vector<GridRegion> regions;
  std::vector<ExtendedValue> values;
  std::string note;
};

struct CheckReport {
  std::string check;
  Verdict verdict = Verdict::Pass;
  std::vector<Witness> witnesses;
  struct Stats {
    std::size_t probes = 0;
    int depth = 0;
    std::size_t inconclusive = 0;
  } stats;
  /// Free-form result, e.g. the class emitted by classify.
  std::string detail;
  std::vector<CheckReport> parts;
};

struct CheckOptions {
  VariationOptions variation;
  /// Witnesses kept per report.
  std::size_t max_witnesses = 4;
};

CheckReport check_nonnegative(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// f(K_1 u ... u K_n) = sum f(K_i) for pairwise disjoint probe compacts, n = 2..4.
CheckReport check_additivity_compacts(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// The same for pairs of disjoint probe opens whose union is open.
CheckReport check_additivity_opens(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// Additivity on every disjoint probe pair whose union is open or closed, plus U = K u (U \ K)
/// for probe compacts inside probe opens.
CheckReport check_tm1(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// Inner limits along erosions of opens and outer limits along dilations of closed sets.
CheckReport check_regularity(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// Increasing open chains (erosion and random) and decreasing compact chains.
CheckReport check_tau_smooth(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
CheckReport check_small_sets(const SetFunction& f, const ProbeFamily& probes, const Rational& eps,
                             const CheckOptions& opts = {});
/// Compact additivity and open additivity must agree.
CheckReport check_additivity_equivalence(const SetFunction& f, const ProbeFamily& probes,
                                         const CheckOptions& opts = {});
/// Limits over solid compacts inside solid opens, and over growing solid squares toward f(X).
CheckReport check_solid_limits(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// f(U u V) + f(U n V) = f(U) + f(V) for probe opens; fails for non-measures.
CheckReport check_modularity(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// norm1 <= norm2 <= 2 norm1 on X, and the same sandwich for every probe open.
CheckReport check_norms(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// f = f+ - f- and |f| = f+ + f- on every probe where the variations settle.
CheckReport jordan_check(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});
/// The DTM suite on f+, f-, |f|, the bounds f+ >= f and f- >= -f, and minimality of f+
/// against each candidate that dominates f on the probes.
CheckReport variation_is_dtm_check(const SetFunction& f, const ProbeFamily& probes,
                                   const std::vector<SetFunction>& candidates = {}, const CheckOptions& opts = {});
/// Agreement of two functions on every probe.
CheckReport check_agreement(const SetFunction& f, const SetFunction& g, const ProbeFamily& probes,
                            const CheckOptions& opts = {});

/// Strongest certified class (detail) with the failing sub-checks kept as exclusion witnesses.
CheckReport classify(const SetFunction& f, const ProbeFamily& probes, const CheckOptions& opts = {});

/// Suites: "dtm", "tm", "sdtm", "stm", "classify".
std::vector<CheckReport> run_suite(std::string_view suite, const SetFunction& f, const ProbeFamily& probes,
                                   const CheckOptions& opts = {});
/// PASS when every report passes; FAIL when any fails; otherwise INCONCLUSIVE.
Verdict combine(const std::vector<CheckReport>& reports);

/// Re-evaluates a witness and confirms it still shows the recorded violation.
bool replay(const SetFunction& f, const Witness& w, const CheckOptions& opts = {});

}  // namespace qmlab
