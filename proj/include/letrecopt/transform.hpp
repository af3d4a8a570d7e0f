#pragma once

// Optimizing transformations: lifting recurrent parameters out of a
// recursion, substituting dominated binders, removing vacuous binders, and
// the verified pipeline combining them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "letrecopt/binding.hpp"
#include "letrecopt/equivalence.hpp"
#include "letrecopt/reduction.hpp"
#include "letrecopt/typing.hpp"

namespace letrecopt {

class NotApplicable : public std::runtime_error {
 public:
  NotApplicable(const std::string& msg, Position site = {})
      : std::runtime_error(msg), site_(std::move(site)) {}
  const Position& site() const { return site_; }

 private:
  Position site_;
};

/// Position of the definition of `f` (ending in a def step), if any.
std::optional<Position> findDefinition(const Term& t, const VarName& f);

/// f = λx₁…x_{k-1}.λy.λz⃗.B becomes
///   λx₁…x_{k-1}.λy. letrec f' = λx₁'…x_{k-1}'.λz⃗'.B' in f' x₁…x_{k-1}
/// where recursive calls f a₁…a_{k-1} y b⃗ in B turn into f' a₁…a_{k-1} b⃗.
/// Shorter uses of f are left alone; a call with at least k arguments whose
/// k-th is not y is rejected. Requires a distinctly bound term.
Term liftRecurrentParameter(const Term& t, const VarName& f, std::uint32_t k);

/// t⟨x := d⟩ for the subterm d identified by `dominator` (an expression
/// node at a position of t, or a variable node). Every free variable of d
/// must be bound at each occurrence of x. The binder λx stays in place.
Term substituteDominated(const Term& t, const VarName& x, const BindingNode& dominator);

struct Elimination {
  Term term;
  std::vector<VarName> removed;
};

/// Removes unused binders of letrec-defined functions whose every use
/// supplies the matching argument, and unused binders of abstractions
/// applied in place, together with those arguments. Repeats to a fixpoint.
Elimination eliminateVacuousBinders(const Term& t);

/// Replaces f's occurrences in the body of its letrec by `letrec D in s_f`
/// and drops the letrec if it became unused; result is distinctly bound.
Term unfoldOnce(const Term& t, const VarName& f);

// ---------------------------------------------------------------------------

struct Candidate {
  enum class Kind { RecurrentParam, DominatedVar };
  Kind kind;
  /// RecurrentParam: the letrec-defined function and the 1-based index.
  VarName function;
  std::uint32_t paramIndex = 0;
  /// The parameter lifted or substituted.
  VarName variable;
  /// DominatedVar: the dominating node.
  std::optional<BindingNode> dominator;
};

std::string describe(const Candidate& c);

/// Candidates in the order the optimizer tries them: dominated binders in
/// pre-order, then self-looping parameters fed only by the blackhole.
std::vector<Candidate> findCandidates(const Analysis& a);

struct OptStep {
  Candidate candidate;
  /// Names unfolded once right before this step.
  std::vector<VarName> unfolded;
  Position before;
  Position after;
  Term termBefore;
  Term termAfter;
  std::vector<VarName> eliminated;
  Verdict verdict;
};

struct OptOptions {
  std::size_t maxUnfolds = 1;
  std::size_t verifyDepth = 8;
  std::uint64_t fuel = kDefaultFuel;
  std::size_t maxSteps = 32;
  TypeEnv sig;
};

struct OptReport {
  std::vector<OptStep> steps;
  std::vector<VarName> binderEliminated;
  bool aborted = false;
  std::string error;
  /// Steps to the verification depth on the bare terms.
  ReductionStats statsBefore;
  ReductionStats statsAfter;
};

struct OptResult {
  Term term;
  OptReport report;
};

/// Throws TypeError for untypable input. On a failed verification the
/// original term is returned and the report is marked aborted.
OptResult optimize(const Term& t, const OptOptions& opts = {});

}  // namespace letrecopt
