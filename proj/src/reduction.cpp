#include "letrecopt/reduction.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace letrecopt {

std::string redexKindName(RedexKind kind) {
  switch (kind) {
    case RedexKind::Beta: return "beta";
    case RedexKind::GBeta: return "gbeta";
    case RedexKind::Eta: return "eta";
    case RedexKind::VecEta0: return "vec-eta0";
    case RedexKind::VecEta0Perm: return "vec-eta0-perm";
    case RedexKind::UnfoldGarbage: return "unfold-garbage";
    case RedexKind::UnfoldBody: return "unfold-body";
  }
  return "?";
}

namespace {

bool anyDefFreeInBody(const Term& l) {
  for (std::size_t i = 0; i < l.defCount(); ++i) {
    if (l.body().hasFree(l.defName(i))) return true;
  }
  return false;
}

// λx₁…xₙ.(λy₁…yₙ.M) x_{π(1)}…x_{π(n)} where n is the full prefix length at
// this node. Returns the permutation on a match.
std::optional<std::vector<std::uint32_t>> matchVecEta(const Term& t) {
  auto [outer, body] = peelAbs(t);
  const std::size_t n = outer.size();
  Spine s = unwindSpine(body);
  if (s.args.size() != n || !s.head.isAbs()) return std::nullopt;
  auto [inner, rest] = peelAbs(s.head);
  if (inner.size() < n) return std::nullopt;
  // Outer binders must be distinct for the rule to apply.
  NameSet distinct(outer.begin(), outer.end());
  if (distinct.size() != n) return std::nullopt;
  for (const VarName& x : outer) {
    if (s.head.hasFree(x)) return std::nullopt;
  }
  std::vector<std::uint32_t> perm;
  std::vector<bool> seen(n, false);
  for (const Term& a : s.args) {
    if (!a.isVar()) return std::nullopt;
    auto it = std::find(outer.begin(), outer.end(), a.name());
    if (it == outer.end()) return std::nullopt;
    auto idx = static_cast<std::uint32_t>(it - outer.begin());
    if (seen[idx]) return std::nullopt;
    seen[idx] = true;
    perm.push_back(idx);
  }
  return perm;
}

bool isIdentity(const std::vector<std::uint32_t>& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] != i) return false;
  }
  return true;
}

class RedexFinder {
 public:
  RedexFinder(const RedexKinds& kinds, std::vector<Redex>& out) : kinds_(kinds), out_(out) {}

  void visit(const Term& t, Position& pos, bool funChild) {
    switch (t.kind()) {
      case TermKind::Var:
        return;
      case TermKind::App:
        if (!funChild) spineRedexes(t, pos);
        descend(t.fun(), pos, funStep(), true);
        descend(t.arg(), pos, argStep(), false);
        return;
      case TermKind::Abs:
        absRedexes(t, pos);
        descend(t.body(), pos, bodyStep(), false);
        return;
      case TermKind::Letrec:
        if (anyDefFreeInBody(t)) {
          if (wants(RedexKind::UnfoldBody)) out_.push_back({RedexKind::UnfoldBody, pos});
        } else if (wants(RedexKind::UnfoldGarbage)) {
          out_.push_back({RedexKind::UnfoldGarbage, pos});
        }
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          descend(t.defBody(i), pos, defStep(static_cast<std::uint32_t>(i)), false);
        }
        descend(t.body(), pos, bodyStep(), false);
        return;
    }
  }

 private:
  bool wants(RedexKind k) const { return kinds_.contains(k); }

  void descend(const Term& c, Position& pos, Step s, bool funChild) {
    pos.push_back(s);
    visit(c, pos, funChild);
    pos.pop_back();
  }

  void spineRedexes(const Term& t, const Position& pos) {
    if (!wants(RedexKind::Beta) && !wants(RedexKind::GBeta)) return;
    Spine s = unwindSpine(t);
    if (!s.head.isAbs()) return;
    const std::size_t m = peelAbs(s.head).first.size();
    const std::size_t p = s.args.size();
    for (std::size_t k = 1; k <= std::min(m, p); ++k) {
      Position at = pos;
      at.insert(at.end(), p - k, funStep());
      if (k == 1 && wants(RedexKind::Beta)) out_.push_back({RedexKind::Beta, at});
      if (wants(RedexKind::GBeta)) {
        out_.push_back({RedexKind::GBeta, at, static_cast<std::uint32_t>(k)});
      }
    }
  }

  void absRedexes(const Term& t, const Position& pos) {
    if (wants(RedexKind::Eta)) {
      Term b = t.body();
      if (b.isApp() && b.arg().isVar() && b.arg().name() == t.binder() && !b.fun().hasFree(t.binder())) {
        out_.push_back({RedexKind::Eta, pos});
      }
    }
    if (wants(RedexKind::VecEta0) || wants(RedexKind::VecEta0Perm)) {
      if (auto perm = matchVecEta(t)) {
        auto n = static_cast<std::uint32_t>(perm->size());
        if (isIdentity(*perm) && wants(RedexKind::VecEta0)) {
          out_.push_back({RedexKind::VecEta0, pos, n, *perm});
        }
        if (wants(RedexKind::VecEta0Perm)) out_.push_back({RedexKind::VecEta0Perm, pos, n, *perm});
      }
    }
  }

  const RedexKinds& kinds_;
  std::vector<Redex>& out_;
};

Term contractGBeta(const Term& node, std::uint32_t k) {
  // node = (λx₁…λxₘ.B) a₁ … a_k with m ≥ k.
  std::vector<Term> args;
  Term cur = node;
  for (std::uint32_t i = 0; i < k; ++i) {
    if (!cur.isApp()) throw StaleRedex("gbeta: spine too short");
    args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(args.begin(), args.end());
  if (peelAbs(cur).first.size() < k) throw StaleRedex("gbeta: abstraction prefix too short");

  const Term& a = args[k - 1];
  const NameSet incoming = freeVars(a);
  NameSet avoid = incoming;
  for (const VarName& n : allNames(cur)) avoid.insert(n);
  // Rename x₁…x_{k-1} that would capture a free variable of a_k. Each
  // renaming is applied to the remaining abstraction so shadowing is kept.
  std::vector<VarName> lead;
  Term rest = cur;
  for (std::uint32_t i = 0; i + 1 < k; ++i) {
    VarName x = rest.binder();
    Term inner = rest.body();
    if (incoming.contains(x)) {
      VarName fresh = freshName(x, avoid);
      avoid.insert(fresh);
      inner = substitute(inner, x, Term::var(fresh));
      x = fresh;
    }
    lead.push_back(x);
    rest = inner;
  }
  Term reduced = substitute(rest.body(), rest.binder(), a);
  Term out = Term::abs(lead, reduced);
  args.erase(args.begin() + (k - 1));
  return Term::apps(out, args);
}

Term contractVecEta(const Term& t, const Redex& r) {
  auto perm = matchVecEta(t);
  if (!perm || perm->size() != r.index || (r.kind == RedexKind::VecEta0 && !isIdentity(*perm)) ||
      (r.kind == RedexKind::VecEta0Perm && !r.perm.empty() && *perm != r.perm)) {
    throw StaleRedex("vec-eta pattern does not match");
  }
  auto [outer, body] = peelAbs(t);
  Spine s = unwindSpine(body);
  const std::size_t n = outer.size();
  Term inner = s.head;
  std::vector<VarName> innerBinders;
  for (std::size_t i = 0; i < n; ++i) {
    innerBinders.push_back(inner.binder());
    inner = inner.body();
  }
  std::map<VarName, Term> subst;
  for (std::size_t i = 0; i < n; ++i) subst[innerBinders[i]] = Term::var(outer[(*perm)[i]]);
  // Inner binders are distinct from each other only if the source was; when
  // they repeat, the innermost occurrence wins, which substituteMany cannot
  // express. Fall back to sequential β in that case.
  NameSet uniq(innerBinders.begin(), innerBinders.end());
  Term reduced;
  if (uniq.size() == n) {
    reduced = substituteMany(inner, subst);
  } else {
    reduced = s.head;
    for (std::size_t i = 0; i < n; ++i) {
      reduced = substitute(reduced.body(), reduced.binder(), Term::var(outer[(*perm)[i]]));
    }
  }
  return Term::abs(outer, reduced);
}

}  // namespace

std::vector<Redex> findRedexes(const Term& t, const RedexKinds& kinds) {
  std::vector<Redex> out;
  Position pos;
  RedexFinder(kinds, out).visit(t, pos, false);
  return out;
}

Term unfoldLetrecBody(const Term& l) {
  std::vector<std::pair<VarName, Term>> defs;
  for (std::size_t i = 0; i < l.defCount(); ++i) defs.emplace_back(l.defName(i), l.defBody(i));
  std::map<VarName, Term> subst;
  for (std::size_t i = 0; i < l.defCount(); ++i) {
    if (l.body().hasFree(l.defName(i))) {
      subst[l.defName(i)] = Term::letrec(defs, l.defBody(i), l.origin());
    }
  }
  return substituteMany(l.body(), subst);
}

Term contract(const Term& t, const Redex& r) {
  Term node;
  try {
    node = subtermAt(t, r.at);
  } catch (const std::out_of_range&) {
    throw StaleRedex("redex position does not resolve");
  }
  Term reduct;
  switch (r.kind) {
    case RedexKind::Beta:
      if (!node.isApp() || !node.fun().isAbs()) throw StaleRedex("not a beta redex");
      reduct = substitute(node.fun().body(), node.fun().binder(), node.arg());
      break;
    case RedexKind::GBeta:
      if (r.index == 0) throw StaleRedex("gbeta index must be positive");
      reduct = contractGBeta(node, r.index);
      break;
    case RedexKind::Eta:
      if (!node.isAbs() || !node.body().isApp() || !node.body().arg().isVar() ||
          node.body().arg().name() != node.binder() || node.body().fun().hasFree(node.binder())) {
        throw StaleRedex("not an eta redex");
      }
      reduct = node.body().fun();
      break;
    case RedexKind::VecEta0:
    case RedexKind::VecEta0Perm:
      if (!node.isAbs()) throw StaleRedex("not an abstraction");
      reduct = contractVecEta(node, r);
      break;
    case RedexKind::UnfoldGarbage:
      if (!node.isLetrec() || anyDefFreeInBody(node)) throw StaleRedex("letrec is not garbage");
      reduct = node.body();
      break;
    case RedexKind::UnfoldBody:
      if (!node.isLetrec() || !anyDefFreeInBody(node)) throw StaleRedex("nothing to unfold");
      reduct = unfoldLetrecBody(node);
      break;
  }
  return replaceAt(t, r.at, reduct);
}

ReductionStats& ReductionStats::operator+=(const ReductionStats& o) {
  betaSteps += o.betaSteps;
  gbetaSteps += o.gbetaSteps;
  unfoldSteps += o.unfoldSteps;
  fuelUsed += o.fuelUsed;
  fuelExhausted = fuelExhausted || o.fuelExhausted;
  return *this;
}

namespace {

class Evaluator {
 public:
  Evaluator(std::uint64_t fuel, Strategy strategy, ReductionStats& stats, const BetaObserver& observer)
      : fuel_(fuel), strategy_(strategy), stats_(stats), observer_(observer) {}

  /// Weak head normal form; false when fuel ran out first.
  bool whnf(Term& t) {
    std::vector<Term> apps;
    for (;;) {
      apps.clear();
      Term head = t;
      while (head.isApp()) {
        apps.push_back(head);
        head = head.fun();
      }
      // apps.back() is the innermost application (first argument).
      if (head.isAbs() && !apps.empty()) {
        if (!spend()) return false;
        const Term& redex = apps.back();
        if (observer_) observer_(head, redex);
        Term reduced = substitute(head.body(), head.binder(), redex.arg());
        t = rebuild(reduced, apps, 1);
        ++stats_.betaSteps;
        continue;
      }
      if (head.isLetrec() && strategy_ == Strategy::Normal) {
        if (!spend()) return false;
        Term reduced = anyDefFreeInBody(head) ? unfoldLetrecBody(head) : head.body();
        t = rebuild(reduced, apps, 0);
        ++stats_.unfoldSteps;
        continue;
      }
      return true;
    }
  }

 private:
  bool spend() {
    if (fuel_ == 0) {
      stats_.fuelExhausted = true;
      return false;
    }
    --fuel_;
    ++stats_.fuelUsed;
    return true;
  }

  // Re-applies the arguments above the consumed ones, keeping the original
  // application nodes' provenance tags.
  static Term rebuild(Term head, const std::vector<Term>& apps, std::size_t consumed) {
    for (std::size_t i = apps.size() - consumed; i-- > 0;) {
      head = Term::app(head, apps[i].arg(), apps[i].origin());
    }
    return head;
  }

  std::uint64_t fuel_;
  Strategy strategy_;
  ReductionStats& stats_;
  const BetaObserver& observer_;
};

struct HeadNormalForm {
  std::vector<VarName> prefix;
  VarName head;
  std::vector<Term> args;
};

std::optional<HeadNormalForm> headNormalForm(const Term& t, std::uint64_t fuel, ReductionStats& stats,
                                             const BetaObserver& observer) {
  Evaluator ev(fuel, Strategy::Normal, stats, observer);
  HeadNormalForm out;
  Term cur = t;
  for (;;) {
    if (!ev.whnf(cur)) return std::nullopt;
    if (cur.isAbs()) {
      out.prefix.push_back(cur.binder());
      cur = cur.body();
      continue;
    }
    Spine s = unwindSpine(cur);
    out.head = s.head.name();
    out.args = std::move(s.args);
    return out;
  }
}

FiniteApprox approxRec(const Term& t, std::size_t depth, std::uint64_t fuel, ReductionStats& stats,
                       const BetaObserver& observer) {
  if (depth == 0) return FiniteApprox::bottom(FiniteApprox::Cause::Depth);
  auto hnf = headNormalForm(t, fuel, stats, observer);
  if (!hnf) return FiniteApprox::bottom(FiniteApprox::Cause::Fuel);
  std::vector<FiniteApprox> children;
  children.reserve(hnf->args.size());
  for (const Term& a : hnf->args) children.push_back(approxRec(a, depth - 1, fuel, stats, observer));
  return FiniteApprox::node(std::move(hnf->prefix), std::move(hnf->head), std::move(children));
}

void canonRec(FiniteApprox& a, std::map<VarName, std::vector<std::size_t>>& scope, std::size_t& counter) {
  if (a.isBottom()) return;
  std::vector<VarName> original = a.prefix;
  for (VarName& b : a.prefix) {
    std::size_t id = counter++;
    scope[b].push_back(id);
    b = "#" + std::to_string(id);
  }
  if (auto it = scope.find(a.head); it != scope.end() && !it->second.empty()) {
    a.head = "#" + std::to_string(it->second.back());
  }
  for (FiniteApprox& c : a.children) canonRec(c, scope, counter);
  for (const VarName& b : original) scope[b].pop_back();
}

void render(const FiniteApprox& a, std::string& out) {
  if (a.isBottom()) {
    out += "_|_";
    return;
  }
  if (!a.prefix.empty()) {
    out += '\\';
    for (std::size_t i = 0; i < a.prefix.size(); ++i) {
      if (i) out += ' ';
      out += a.prefix[i];
    }
    out += ". ";
  }
  out += a.head;
  for (const FiniteApprox& c : a.children) {
    out += ' ';
    bool atomic = c.isBottom() || (c.prefix.empty() && c.children.empty());
    if (!atomic) out += '(';
    render(c, out);
    if (!atomic) out += ')';
  }
}

}  // namespace

EvalResult normalOrderEval(const Term& t, std::uint64_t fuel, Strategy strategy,
                           const BetaObserver& observer) {
  EvalResult r{t, {}};
  Evaluator(fuel, strategy, r.stats, observer).whnf(r.term);
  return r;
}

FiniteApprox FiniteApprox::bottom(Cause cause) {
  FiniteApprox a;
  a.kind = Kind::Bottom;
  a.cause = cause;
  return a;
}

FiniteApprox FiniteApprox::node(std::vector<VarName> prefix, VarName head,
                                std::vector<FiniteApprox> children) {
  FiniteApprox a;
  a.kind = Kind::Node;
  a.prefix = std::move(prefix);
  a.head = std::move(head);
  a.children = std::move(children);
  return a;
}

bool FiniteApprox::hitFuel() const {
  if (isBottom()) return cause == Cause::Fuel;
  return std::any_of(children.begin(), children.end(), [](const FiniteApprox& c) { return c.hitFuel(); });
}

std::size_t FiniteApprox::height() const {
  if (isBottom()) return 0;
  std::size_t h = 0;
  for (const FiniteApprox& c : children) h = std::max(h, c.height());
  return h + 1;
}

bool operator==(const FiniteApprox& a, const FiniteApprox& b) {
  if (a.kind != b.kind) return false;
  if (a.isBottom()) return true;
  return a.prefix == b.prefix && a.head == b.head && a.children == b.children;
}

FiniteApprox canonicalize(const FiniteApprox& a) {
  FiniteApprox out = a;
  std::map<VarName, std::vector<std::size_t>> scope;
  std::size_t counter = 0;
  canonRec(out, scope, counter);
  return out;
}

std::string printApprox(const FiniteApprox& a) {
  std::string out;
  render(a, out);
  return out;
}

FiniteApprox boehmApprox(const Term& t, std::size_t depth, std::uint64_t fuel, ReductionStats* stats,
                         const BetaObserver& observer) {
  ReductionStats local;
  FiniteApprox raw = approxRec(t, depth, fuel, stats ? *stats : local, observer);
  return canonicalize(raw);
}

ReductionStats countStepsToDepth(const Term& t, std::size_t depth, std::uint64_t fuel) {
  ReductionStats stats;
  boehmApprox(t, depth, fuel, &stats);
  return stats;
}

}  // namespace letrecopt
