#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "letrecopt/syntax.hpp"

namespace letrecopt {

enum class RedexKind { Beta, GBeta, Eta, VecEta0, VecEta0Perm, UnfoldGarbage, UnfoldBody };

std::string redexKindName(RedexKind kind);

struct Redex {
  RedexKind kind;
  Position at;
  /// GBeta: 1-based index k of the binder/argument pair.
  /// VecEta0 / VecEta0Perm: length n of the abstraction prefix.
  std::uint32_t index = 0;
  /// VecEta0Perm: argument i is outer binder perm[i] (0-based).
  std::vector<std::uint32_t> perm;

  friend bool operator==(const Redex&, const Redex&) = default;
};

using RedexKinds = std::set<RedexKind>;

inline const RedexKinds& allRedexKinds() {
  static const RedexKinds kinds{RedexKind::Beta,    RedexKind::GBeta,       RedexKind::Eta,
                                RedexKind::VecEta0, RedexKind::VecEta0Perm, RedexKind::UnfoldGarbage,
                                RedexKind::UnfoldBody};
  return kinds;
}

class StaleRedex : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Leftmost-outermost. The binder/argument pairs of one application spine are
/// reported together when the spine root is visited, ordered by k.
std::vector<Redex> findRedexes(const Term& t, const RedexKinds& kinds);

/// One-step reduct. Throws StaleRedex if `r` no longer matches `t`.
Term contract(const Term& t, const Redex& r);

/// letrec D in b  ->  b[fᵢ := letrec D in sᵢ]. The letrec must have at least
/// one defined name free in its body.
Term unfoldLetrecBody(const Term& letrec);

struct ReductionStats {
  std::uint64_t betaSteps = 0;
  std::uint64_t gbetaSteps = 0;
  std::uint64_t unfoldSteps = 0;
  std::uint64_t fuelUsed = 0;
  bool fuelExhausted = false;

  ReductionStats& operator+=(const ReductionStats& o);
  friend bool operator==(const ReductionStats&, const ReductionStats&) = default;
};

enum class Strategy {
  Normal,    // leftmost-outermost β, letrec unfolded lazily at the head
  BetaOnly,  // leftmost-outermost β only; a letrec at the head is stuck
};

inline constexpr std::uint64_t kDefaultFuel = 10'000;

/// Called before every β-contraction with the abstraction and the
/// application node whose argument it consumes.
using BetaObserver = std::function<void(const Term& abstraction, const Term& application)>;

struct EvalResult {
  Term term;
  ReductionStats stats;
};

/// Reduces to weak head normal form: stops at an abstraction, at a spine
/// headed by a variable, or when fuel runs out (term returned as reached).
/// Every contraction of any kind costs one unit of fuel.
EvalResult normalOrderEval(const Term& t, std::uint64_t fuel = kDefaultFuel,
                           Strategy strategy = Strategy::Normal, const BetaObserver& observer = {});

// ---------------------------------------------------------------------------
// Finite Böhm-style approximations

struct FiniteApprox {
  enum class Kind { Bottom, Node };
  enum class Cause { Depth, Fuel };

  Kind kind = Kind::Bottom;
  Cause cause = Cause::Depth;  // Bottom only
  std::vector<VarName> prefix;
  VarName head;
  std::vector<FiniteApprox> children;

  static FiniteApprox bottom(Cause cause = Cause::Depth);
  static FiniteApprox node(std::vector<VarName> prefix, VarName head,
                           std::vector<FiniteApprox> children = {});

  bool isBottom() const { return kind == Kind::Bottom; }
  /// True if any Bottom in the tree was caused by fuel exhaustion.
  bool hitFuel() const;
  std::size_t height() const;

  /// Structural equality; the cause of a Bottom is ignored.
  friend bool operator==(const FiniteApprox& a, const FiniteApprox& b);
};

/// Renames bound names to #0, #1, … in pre-order so that α-equivalent
/// approximations become structurally equal.
FiniteApprox canonicalize(const FiniteApprox& a);

std::string printApprox(const FiniteApprox& a);

/// Depth-d approximation: Bottom at depth 0; otherwise the head normal form
/// (λ-prefix, head variable) with each argument approximated at depth d-1.
/// `fuel` is the budget for each head normal form. Result is canonical.
FiniteApprox boehmApprox(const Term& t, std::size_t depth, std::uint64_t fuel = kDefaultFuel,
                         ReductionStats* stats = nullptr, const BetaObserver& observer = {});

ReductionStats countStepsToDepth(const Term& t, std::size_t depth,
                                 std::uint64_t fuel = kDefaultFuel);

}  // namespace letrecopt
