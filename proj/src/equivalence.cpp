#include "letrecopt/equivalence.hpp"

#include <map>
#include <optional>
#include <random>

namespace letrecopt {

std::string printVerdict(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::EquivalentToDepth:
      return "equivalent to depth " + std::to_string(v.depth);
    case Verdict::Kind::Distinct: {
      std::string path = "root";
      for (std::size_t i : v.witness) path += "." + std::to_string(i);
      return "distinct at " + path + ": " + v.reason;
    }
    case Verdict::Kind::Inconclusive:
      return "inconclusive (" + v.reason + ")";
  }
  return "?";
}

namespace {

// Compares two approximation trees by binder level, so that a difference in
// one subtree does not shift names in the next.
class TreeComparer {
 public:
  void compare(const FiniteApprox& a, const FiniteApprox& b) { visit(a, b); }

  bool fuelInvolved = false;
  std::optional<std::vector<std::size_t>> witness;
  std::string reason;

 private:
  void visit(const FiniteApprox& a, const FiniteApprox& b) {
    if (witness) return;
    const bool fuelA = a.isBottom() && a.cause == FiniteApprox::Cause::Fuel;
    const bool fuelB = b.isBottom() && b.cause == FiniteApprox::Cause::Fuel;
    if (fuelA || fuelB) {
      fuelInvolved = true;
      return;
    }
    if (a.isBottom() || b.isBottom()) {
      if (a.isBottom() != b.isBottom()) differ("cutoff on one side only");
      return;
    }
    if (a.prefix.size() != b.prefix.size()) {
      return differ("abstraction prefixes of length " + std::to_string(a.prefix.size()) + " and " +
                    std::to_string(b.prefix.size()));
    }
    for (std::size_t i = 0; i < a.prefix.size(); ++i) {
      levelA_[a.prefix[i]] = depth_ + i;
      levelB_[b.prefix[i]] = depth_ + i;
    }
    depth_ += a.prefix.size();
    auto la = levelA_.find(a.head);
    auto lb = levelB_.find(b.head);
    const bool boundA = la != levelA_.end();
    const bool boundB = lb != levelB_.end();
    if (boundA != boundB || (boundA && la->second != lb->second) || (!boundA && a.head != b.head)) {
      differ("heads " + a.head + " and " + b.head);
    } else if (a.children.size() != b.children.size()) {
      differ("heads applied to " + std::to_string(a.children.size()) + " and " +
             std::to_string(b.children.size()) + " arguments");
    } else {
      for (std::size_t i = 0; i < a.children.size() && !witness; ++i) {
        path_.push_back(i);
        visit(a.children[i], b.children[i]);
        path_.pop_back();
      }
    }
    depth_ -= a.prefix.size();
    for (std::size_t i = 0; i < a.prefix.size(); ++i) {
      levelA_.erase(a.prefix[i]);
      levelB_.erase(b.prefix[i]);
    }
  }

  void differ(std::string why) {
    witness = path_;
    reason = std::move(why);
  }

  std::map<VarName, std::size_t> levelA_;
  std::map<VarName, std::size_t> levelB_;
  std::size_t depth_ = 0;
  std::vector<std::size_t> path_;
};

}  // namespace

Verdict checkOpEq(const Term& a, const Term& b, std::size_t depth, std::uint64_t fuel) {
  FiniteApprox ta = boehmApprox(a, depth, fuel);
  FiniteApprox tb = boehmApprox(b, depth, fuel);
  TreeComparer cmp;
  cmp.compare(ta, tb);
  Verdict v;
  v.depth = depth;
  if (cmp.witness) {
    v.kind = Verdict::Kind::Distinct;
    v.witness = *cmp.witness;
    v.reason = cmp.reason;
  } else if (cmp.fuelInvolved) {
    v.kind = Verdict::Kind::Inconclusive;
    v.reason = "fuel";
  } else {
    v.kind = Verdict::Kind::EquivalentToDepth;
  }
  return v;
}

std::vector<Term> experimentProbes() {
  static const std::vector<Term> probes{
      parse("p0"),
      parse("p1"),
      parse("\\a. a"),
      parse("\\a. \\b. a"),
      parse("\\a. \\b. \\s. s a b"),
  };
  return probes;
}

Verdict applicativeExperiments(const Term& a, const Term& b, std::size_t rounds, std::uint32_t seed,
                               std::uint64_t fuel) {
  const std::vector<Term> pool = experimentProbes();
  std::mt19937 rng(seed);
  Term ca = a;
  Term cb = b;
  Verdict v;
  v.depth = rounds;
  for (std::size_t round = 0; round < rounds; ++round) {
    EvalResult ra = normalOrderEval(ca, fuel);
    EvalResult rb = normalOrderEval(cb, fuel);
    if (ra.stats.fuelExhausted || rb.stats.fuelExhausted) {
      v.kind = Verdict::Kind::Inconclusive;
      v.reason = "fuel";
      v.witness = {round};
      return v;
    }
    const bool absA = ra.term.isAbs();
    const bool absB = rb.term.isAbs();
    if (absA != absB) {
      v.kind = Verdict::Kind::Distinct;
      v.witness = {round};
      v.reason = absA ? "only the first term reduces to an abstraction"
                      : "only the second term reduces to an abstraction";
      return v;
    }
    if (!absA) break;
    const Term& probe = pool[rng() % pool.size()];
    ca = Term::app(ra.term, probe);
    cb = Term::app(rb.term, probe);
  }
  v.kind = Verdict::Kind::EquivalentToDepth;
  return v;
}

}  // namespace letrecopt
