#pragma once

// Bounded operational equivalence: comparison of finite approximations and
// applicative experiments with a fixed probe pool.

#include <cstdint>
#include <string>
#include <vector>

#include "letrecopt/reduction.hpp"

namespace letrecopt {

struct Verdict {
  enum class Kind { EquivalentToDepth, Distinct, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::size_t depth = 0;
  /// Distinct: child indices from the root of the approximation trees to
  /// the first differing node. For experiments: the round.
  std::vector<std::size_t> witness;
  /// Distinct: what differs. Inconclusive: "fuel" or "depth".
  std::string reason;

  bool equivalent() const { return kind == Kind::EquivalentToDepth; }
  bool distinct() const { return kind == Kind::Distinct; }
};

std::string printVerdict(const Verdict& v);

Verdict checkOpEq(const Term& a, const Term& b, std::size_t depth, std::uint64_t fuel = kDefaultFuel);

/// Applies both terms to the same pseudo-random probes (seeded) and compares
/// whether each reduces to an abstraction. `fuel` bounds each evaluation.
Verdict applicativeExperiments(const Term& a, const Term& b, std::size_t rounds, std::uint32_t seed,
                               std::uint64_t fuel = kDefaultFuel);

/// The probe pool used by applicativeExperiments, in draw order.
std::vector<Term> experimentProbes();

}  // namespace letrecopt
