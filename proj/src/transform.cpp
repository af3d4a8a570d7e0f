#include "letrecopt/transform.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace letrecopt {

namespace {

Position extended(Position p, Step s, std::size_t times = 1) {
  p.insert(p.end(), times, s);
  return p;
}

// Position of the i-th argument (0-based) of a spine with n arguments rooted
// at `root`.
Position argPosition(const Position& root, std::size_t i, std::size_t n) {
  Position p = extended(root, funStep(), n - 1 - i);
  p.push_back(argStep());
  return p;
}

std::optional<Position> findBinder(const Term& t, const VarName& x, Position& pos) {
  switch (t.kind()) {
    case TermKind::Var:
      return std::nullopt;
    case TermKind::Abs: {
      if (t.binder() == x) return pos;
      pos.push_back(bodyStep());
      auto r = findBinder(t.body(), x, pos);
      pos.pop_back();
      return r;
    }
    case TermKind::App: {
      pos.push_back(funStep());
      auto r = findBinder(t.fun(), x, pos);
      if (!r) {
        pos.back() = argStep();
        r = findBinder(t.arg(), x, pos);
      }
      pos.pop_back();
      return r;
    }
    case TermKind::Letrec:
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        pos.push_back(defStep(static_cast<std::uint32_t>(i)));
        auto r = findBinder(t.defBody(i), x, pos);
        pos.pop_back();
        if (r) return r;
      }
      pos.push_back(bodyStep());
      auto r = findBinder(t.body(), x, pos);
      pos.pop_back();
      return r;
  }
  return std::nullopt;
}

// Rebuilds every application spine headed by `f`, letting `edit` rewrite the
// argument list (already rewritten recursively) and the head name.
using SpineEdit = std::function<void(std::vector<Term>& args, VarName& head, const Position& at)>;

Term rewriteSpines(const Term& t, const VarName& f, const SpineEdit& edit, Position& pos) {
  switch (t.kind()) {
    case TermKind::Var:
      return t;
    case TermKind::Abs: {
      pos.push_back(bodyStep());
      Term b = rewriteSpines(t.body(), f, edit, pos);
      pos.pop_back();
      return Term::abs(t.binder(), b);
    }
    case TermKind::Letrec: {
      std::vector<std::pair<VarName, Term>> defs;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        pos.push_back(defStep(static_cast<std::uint32_t>(i)));
        defs.emplace_back(t.defName(i), rewriteSpines(t.defBody(i), f, edit, pos));
        pos.pop_back();
      }
      pos.push_back(bodyStep());
      Term b = rewriteSpines(t.body(), f, edit, pos);
      pos.pop_back();
      return Term::letrec(std::move(defs), b);
    }
    case TermKind::App: {
      Spine s = unwindSpine(t);
      const std::size_t n = s.args.size();
      std::vector<Term> args;
      for (std::size_t i = 0; i < n; ++i) {
        Position ap = argPosition(pos, i, n);
        args.push_back(rewriteSpines(s.args[i], f, edit, ap));
      }
      if (s.head.isVar() && s.head.name() == f) {
        VarName head = f;
        edit(args, head, pos);
        return Term::apps(Term::var(head), args);
      }
      Position hp = extended(pos, funStep(), n);
      return Term::apps(rewriteSpines(s.head, f, edit, hp), args);
    }
  }
  return t;
}

// Number of arguments at every use of f; a use not heading a spine counts 0.
void collectUses(const Term& t, const VarName& f, std::vector<std::size_t>& out) {
  switch (t.kind()) {
    case TermKind::Var:
      if (t.name() == f) out.push_back(0);
      return;
    case TermKind::Abs:
      collectUses(t.body(), f, out);
      return;
    case TermKind::Letrec:
      for (std::size_t i = 0; i < t.defCount(); ++i) collectUses(t.defBody(i), f, out);
      collectUses(t.body(), f, out);
      return;
    case TermKind::App: {
      Spine s = unwindSpine(t);
      if (s.head.isVar() && s.head.name() == f) {
        out.push_back(s.args.size());
      } else {
        collectUses(s.head, f, out);
      }
      for (const Term& a : s.args) collectUses(a, f, out);
      return;
    }
  }
}

NameSet boundNames(const Term& t) {
  NameSet all = allNames(t);
  for (const VarName& v : t.freeVarList()) all.erase(v);
  return all;
}

void lambdaBinders(const Term& t, std::vector<VarName>& out) {
  switch (t.kind()) {
    case TermKind::Var: return;
    case TermKind::Abs:
      out.push_back(t.binder());
      lambdaBinders(t.body(), out);
      return;
    case TermKind::App:
      lambdaBinders(t.fun(), out);
      lambdaBinders(t.arg(), out);
      return;
    case TermKind::Letrec:
      for (std::size_t i = 0; i < t.defCount(); ++i) lambdaBinders(t.defBody(i), out);
      lambdaBinders(t.body(), out);
      return;
  }
}

void letrecNames(const Term& t, std::vector<VarName>& out) {
  switch (t.kind()) {
    case TermKind::Var: return;
    case TermKind::Abs: letrecNames(t.body(), out); return;
    case TermKind::App:
      letrecNames(t.fun(), out);
      letrecNames(t.arg(), out);
      return;
    case TermKind::Letrec:
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        out.push_back(t.defName(i));
        letrecNames(t.defBody(i), out);
      }
      letrecNames(t.body(), out);
      return;
  }
}

VarName primed(const VarName& f, NameSet& avoid) {
  VarName n = f + "'";
  if (avoid.contains(n)) n = freshName(f, avoid);
  avoid.insert(n);
  return n;
}

}  // namespace

std::optional<Position> findDefinition(const Term& t, const VarName& f) {
  std::function<std::optional<Position>(const Term&, Position&)> go =
      [&](const Term& u, Position& pos) -> std::optional<Position> {
    switch (u.kind()) {
      case TermKind::Var:
        return std::nullopt;
      case TermKind::Abs: {
        pos.push_back(bodyStep());
        auto r = go(u.body(), pos);
        pos.pop_back();
        return r;
      }
      case TermKind::App: {
        pos.push_back(funStep());
        auto r = go(u.fun(), pos);
        if (!r) {
          pos.back() = argStep();
          r = go(u.arg(), pos);
        }
        pos.pop_back();
        return r;
      }
      case TermKind::Letrec: {
        for (std::size_t i = 0; i < u.defCount(); ++i) {
          if (u.defName(i) == f) return extended(pos, defStep(static_cast<std::uint32_t>(i)));
        }
        for (std::size_t i = 0; i < u.defCount(); ++i) {
          pos.push_back(defStep(static_cast<std::uint32_t>(i)));
          auto r = go(u.defBody(i), pos);
          pos.pop_back();
          if (r) return r;
        }
        pos.push_back(bodyStep());
        auto r = go(u.body(), pos);
        pos.pop_back();
        return r;
      }
    }
    return std::nullopt;
  };
  Position pos;
  return go(t, pos);
}

Term liftRecurrentParameter(const Term& t, const VarName& f, std::uint32_t k) {
  auto dp = findDefinition(t, f);
  if (!dp) throw NotApplicable(f + " is not defined by a letrec");
  if (k == 0) throw NotApplicable("parameter index must be positive");
  Term def = subtermAt(t, *dp);
  auto [binders, body] = peelAbs(def);
  if (binders.size() < k) {
    throw NotApplicable(f + " has " + std::to_string(binders.size()) + " parameters, not " + std::to_string(k), *dp);
  }
  const std::vector<VarName> xs(binders.begin(), binders.begin() + (k - 1));
  const VarName y = binders[k - 1];
  const std::vector<VarName> zs(binders.begin() + k, binders.end());

  NameSet avoid = allNames(t);
  const VarName inner = primed(f, avoid);

  std::size_t good = 0;
  SpineEdit edit = [&](std::vector<Term>& args, VarName& head, const Position& at) {
    if (args.size() < k) return;
    const Term& a = args[k - 1];
    if (!a.isVar() || a.name() != y) {
      throw NotApplicable("call at " + positionToString(at) + " passes " + print(a) + " instead of " + y +
                              " as argument " + std::to_string(k) + " of " + f,
                          at);
    }
    args.erase(args.begin() + (k - 1));
    head = inner;
    ++good;
  };
  Position bodyPos = extended(*dp, bodyStep(), binders.size());
  Term rewritten = rewriteSpines(body, f, edit, bodyPos);
  if (good == 0) throw NotApplicable("no recursive call of " + f + " passes " + y, *dp);

  std::map<VarName, Term> rename;
  std::vector<VarName> innerParams;
  for (const VarName& v : xs) {
    VarName n = primed(v, avoid);
    rename.emplace(v, Term::var(n));
    innerParams.push_back(n);
  }
  for (const VarName& v : zs) {
    VarName n = primed(v, avoid);
    rename.emplace(v, Term::var(n));
    innerParams.push_back(n);
  }
  Term innerDef = Term::abs(innerParams, substituteMany(rewritten, rename));
  std::vector<Term> headerArgs;
  for (const VarName& v : xs) headerArgs.push_back(Term::var(v));
  Term header = Term::apps(Term::var(inner), headerArgs);
  std::vector<VarName> outer = xs;
  outer.push_back(y);
  Term newDef = Term::abs(outer, Term::letrec({{inner, innerDef}}, header));
  return replaceAt(t, *dp, newDef);
}

Term substituteDominated(const Term& t, const VarName& x, const BindingNode& dominator) {
  Term d;
  switch (dominator.kind) {
    case BindingNode::Kind::Blackhole:
      throw NotApplicable("the blackhole cannot be substituted for " + x);
    case BindingNode::Kind::Variable:
      if (dominator.label == x) throw NotApplicable(x + " cannot dominate itself");
      d = Term::var(dominator.label);
      break;
    case BindingNode::Kind::Expression:
      try {
        d = subtermAt(t, dominator.at);
      } catch (const std::out_of_range&) {
        throw NotApplicable("dominator position " + positionToString(dominator.at) + " does not resolve");
      }
      break;
  }
  if (d.hasFree(x)) throw NotApplicable("dominator " + print(d) + " mentions " + x);
  Position scratch;
  if (!findBinder(t, x, scratch)) throw NotApplicable(x + " is not bound by an abstraction");

  const NameSet bound = boundNames(t);
  NameSet need;
  for (const VarName& v : d.freeVarList()) {
    if (bound.contains(v)) need.insert(v);
  }
  // Grafting: names are unique, so each free name of d must already be
  // bound where x occurs and no renaming is wanted.
  NameSet scope;
  std::function<Term(const Term&, Position&)> graft = [&](const Term& u, Position& pos) -> Term {
    switch (u.kind()) {
      case TermKind::Var:
        if (u.name() != x) return u;
        for (const VarName& v : need) {
          if (!scope.contains(v)) {
            throw NotApplicable(v + " is not in scope at the occurrence of " + x + " at " + positionToString(pos),
                                pos);
          }
        }
        return d;
      case TermKind::Abs: {
        scope.insert(u.binder());
        pos.push_back(bodyStep());
        Term b = graft(u.body(), pos);
        pos.pop_back();
        scope.erase(u.binder());
        return Term::abs(u.binder(), b);
      }
      case TermKind::App: {
        pos.push_back(funStep());
        Term f = graft(u.fun(), pos);
        pos.back() = argStep();
        Term a = graft(u.arg(), pos);
        pos.pop_back();
        return Term::app(f, a);
      }
      case TermKind::Letrec: {
        for (std::size_t i = 0; i < u.defCount(); ++i) scope.insert(u.defName(i));
        std::vector<std::pair<VarName, Term>> defs;
        for (std::size_t i = 0; i < u.defCount(); ++i) {
          pos.push_back(defStep(static_cast<std::uint32_t>(i)));
          defs.emplace_back(u.defName(i), graft(u.defBody(i), pos));
          pos.pop_back();
        }
        pos.push_back(bodyStep());
        Term b = graft(u.body(), pos);
        pos.pop_back();
        for (std::size_t i = 0; i < u.defCount(); ++i) scope.erase(u.defName(i));
        return Term::letrec(std::move(defs), b);
      }
    }
    return u;
  };
  Position pos;
  return ensureDistinctlyBound(graft(t, pos));
}

namespace {

// One removal, or nullopt when nothing is vacuous.
std::optional<Elimination> eliminateOne(const Term& t) {
  // Letrec-defined functions.
  std::vector<VarName> names;
  letrecNames(t, names);
  for (const VarName& f : names) {
    Position dp = *findDefinition(t, f);
    auto [binders, body] = peelAbs(subtermAt(t, dp));
    std::vector<std::size_t> uses;
    collectUses(t, f, uses);
    const std::size_t minUse = uses.empty() ? binders.size() : *std::min_element(uses.begin(), uses.end());
    for (std::size_t i = 0; i < binders.size() && i < minUse; ++i) {
      Term rest = Term::abs(std::vector<VarName>(binders.begin() + i + 1, binders.end()), body);
      if (rest.hasFree(binders[i])) continue;
      std::vector<VarName> kept = binders;
      kept.erase(kept.begin() + i);
      Term shrunk = replaceAt(t, dp, Term::abs(kept, body));
      SpineEdit drop = [i](std::vector<Term>& args, VarName&, const Position&) { args.erase(args.begin() + i); };
      Position root;
      return Elimination{rewriteSpines(shrunk, f, drop, root), {binders[i]}};
    }
  }
  // Abstractions applied in place, possibly under a letrec.
  std::optional<Elimination> found;
  std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
    if (found) return u;
    switch (u.kind()) {
      case TermKind::Var:
        return u;
      case TermKind::Abs:
        return Term::abs(u.binder(), go(u.body()));
      case TermKind::Letrec: {
        std::vector<std::pair<VarName, Term>> defs;
        for (std::size_t i = 0; i < u.defCount(); ++i) defs.emplace_back(u.defName(i), go(u.defBody(i)));
        return Term::letrec(std::move(defs), go(u.body()));
      }
      case TermKind::App: {
        Spine s = unwindSpine(u);
        std::vector<Term> letrecs;
        Term head = s.head;
        while (head.isLetrec()) {
          letrecs.push_back(head);
          head = head.body();
        }
        if (head.isAbs()) {
          auto [binders, body] = peelAbs(head);
          for (std::size_t i = 0; i < binders.size() && i < s.args.size(); ++i) {
            Term rest = Term::abs(std::vector<VarName>(binders.begin() + i + 1, binders.end()), body);
            if (rest.hasFree(binders[i])) continue;
            std::vector<VarName> kept = binders;
            kept.erase(kept.begin() + i);
            Term newHead = Term::abs(kept, body);
            for (auto it = letrecs.rbegin(); it != letrecs.rend(); ++it) {
              std::vector<std::pair<VarName, Term>> defs;
              for (std::size_t j = 0; j < it->defCount(); ++j) defs.emplace_back(it->defName(j), it->defBody(j));
              newHead = Term::letrec(std::move(defs), newHead);
            }
            std::vector<Term> args = s.args;
            args.erase(args.begin() + i);
            found = Elimination{{}, {binders[i]}};
            return Term::apps(newHead, args);
          }
        }
        Term h = go(s.head);
        std::vector<Term> args;
        for (const Term& a : s.args) args.push_back(go(a));
        return Term::apps(h, args);
      }
    }
    return u;
  };
  Term r = go(t);
  if (found) found->term = r;
  return found;
}

}  // namespace

Elimination eliminateVacuousBinders(const Term& t) {
  Elimination out{t, {}};
  while (auto step = eliminateOne(out.term)) {
    out.term = step->term;
    out.removed.insert(out.removed.end(), step->removed.begin(), step->removed.end());
  }
  return out;
}

Term unfoldOnce(const Term& t, const VarName& f) {
  auto dp = findDefinition(t, f);
  if (!dp) throw NotApplicable(f + " is not defined by a letrec");
  Position lp(dp->begin(), dp->end() - 1);
  Term l = subtermAt(t, lp);
  std::vector<std::pair<VarName, Term>> defs;
  std::size_t self = 0;
  for (std::size_t i = 0; i < l.defCount(); ++i) {
    defs.emplace_back(l.defName(i), l.defBody(i));
    if (l.defName(i) == f) self = i;
  }
  Term body = substitute(l.body(), f, Term::letrec(defs, l.defBody(self)));
  bool used = false;
  for (const auto& d : defs) used = used || body.hasFree(d.first);
  Term replacement = used ? Term::letrec(defs, body) : body;
  return ensureDistinctlyBound(replaceAt(t, lp, replacement));
}

// ---------------------------------------------------------------------------

std::string describe(const Candidate& c) {
  if (c.kind == Candidate::Kind::RecurrentParam) {
    return "lift parameter " + std::to_string(c.paramIndex) + " (" + c.variable + ") of " + c.function;
  }
  std::string d = c.dominator ? c.dominator->label : "?";
  return "substitute " + c.variable + " := " + d;
}

std::vector<Candidate> findCandidates(const Analysis& a) {
  const BindingGraph& g = a.graph;
  const Digraph dg = g.digraph();
  const DomPairs sd = strongDomFixpoint(dg);
  std::vector<Candidate> out;

  for (BindingGraph::NodeId x = 0; x < g.nodeCount(); ++x) {
    const BindingNode& node = g.node(x);
    if (node.kind != BindingNode::Kind::Variable) continue;
    Position bp;
    auto at = findBinder(a.term, node.label, bp);
    if (!at || !subtermAt(a.term, *at).body().hasFree(node.label)) continue;
    std::vector<BindingGraph::NodeId> doms;
    for (const auto& [v, w] : sd) {
      if (w == x && g.node(v).kind != BindingNode::Kind::Blackhole) doms.push_back(v);
    }
    if (doms.empty()) continue;
    // The deepest dominator is dominated by the most other dominators.
    auto depth = [&](BindingGraph::NodeId v) {
      std::size_t n = 0;
      for (auto u : doms) n += sd.contains({u, v}) ? 1 : 0;
      return n;
    };
    BindingGraph::NodeId best = doms.front();
    for (auto v : doms) {
      if (depth(v) > depth(best)) best = v;
    }
    out.push_back({Candidate::Kind::DominatedVar, {}, 0, node.label, node});
    out.back().dominator = g.node(best);
  }

  std::vector<std::pair<VarName, Position>> defs;
  std::vector<VarName> names;
  letrecNames(a.term, names);
  for (const VarName& f : names) defs.emplace_back(f, *findDefinition(a.term, f));
  for (BindingGraph::NodeId y = 0; y < g.nodeCount(); ++y) {
    const BindingNode& node = g.node(y);
    if (node.kind != BindingNode::Kind::Variable || !g.hasEdge(y, y)) continue;
    bool onlyBlackhole = true;
    for (auto u : dg.predecessors(y)) {
      if (u != y && g.node(u).kind != BindingNode::Kind::Blackhole) onlyBlackhole = false;
    }
    if (!onlyBlackhole) continue;
    for (const auto& [f, dp] : defs) {
      auto binders = peelAbs(subtermAt(a.term, dp)).first;
      auto it = std::find(binders.begin(), binders.end(), node.label);
      if (it == binders.end()) continue;
      out.push_back({Candidate::Kind::RecurrentParam, f, static_cast<std::uint32_t>(it - binders.begin() + 1),
                     node.label, std::nullopt});
    }
  }
  return out;
}

namespace {

Position resolvablePrefix(const Term& t, Position p) {
  while (!p.empty()) {
    try {
      subtermAt(t, p);
      return p;
    } catch (const std::out_of_range&) {
      p.pop_back();
    }
  }
  return p;
}

std::optional<OptStep> applyFirst(const Term& term, const Analysis& a, const TypeEnv& sig,
                                  const NameSet* restrictTo) {
  for (const Candidate& c : findCandidates(a)) {
    if (restrictTo && !restrictTo->contains(c.variable)) continue;
    OptStep step;
    step.candidate = c;
    step.termBefore = term;
    try {
      if (c.kind == Candidate::Kind::DominatedVar) {
        Position bp;
        step.before = *findBinder(term, c.variable, bp);
        Term s = substituteDominated(term, c.variable, *c.dominator);
        Elimination e = eliminateVacuousBinders(s);
        step.eliminated = e.removed;
        step.termAfter = ensureDistinctlyBound(e.term);
      } else {
        step.before = *findDefinition(term, c.function);
        step.termAfter = ensureDistinctlyBound(liftRecurrentParameter(term, c.function, c.paramIndex));
      }
    } catch (const NotApplicable&) {
      continue;
    }
    if (alphaEq(step.termAfter, term) || !isTypable(step.termAfter, sig)) continue;
    step.after = resolvablePrefix(step.termAfter, step.before);
    return step;
  }
  return std::nullopt;
}

}  // namespace

OptResult optimize(const Term& t, const OptOptions& opts) {
  Term cur = ensureDistinctlyBound(t);
  inferTypes(cur, opts.sig);
  OptReport report;
  report.statsBefore = countStepsToDepth(cur, opts.verifyDepth, opts.fuel);
  std::size_t unfoldsLeft = opts.maxUnfolds;

  for (std::size_t n = 0; n < opts.maxSteps; ++n) {
    Analysis a = analyze(cur, opts.sig);
    std::optional<OptStep> step = applyFirst(a.term, a, opts.sig, nullptr);
    if (!step && unfoldsLeft > 0) {
      // An unfolding is kept only if it exposes a candidate on one of the
      // binders that existed before it.
      std::vector<VarName> before;
      lambdaBinders(cur, before);
      const NameSet original(before.begin(), before.end());
      std::vector<VarName> names;
      letrecNames(cur, names);
      for (const VarName& f : names) {
        Term u = unfoldOnce(cur, f);
        if (!isTypable(u, opts.sig)) continue;
        Analysis au = analyze(u, opts.sig);
        step = applyFirst(au.term, au, opts.sig, &original);
        if (step) {
          step->unfolded.push_back(f);
          step->termBefore = cur;
          --unfoldsLeft;
          break;
        }
      }
    }
    if (!step) break;
    step->verdict = checkOpEq(cur, step->termAfter, opts.verifyDepth, opts.fuel);
    if (!step->verdict.equivalent()) {
      report.aborted = true;
      report.error = describe(step->candidate) + ": " + printVerdict(step->verdict);
      report.steps.push_back(std::move(*step));
      report.binderEliminated.clear();
      report.statsAfter = report.statsBefore;
      return {t, std::move(report)};
    }
    for (const VarName& v : step->eliminated) report.binderEliminated.push_back(v);
    cur = step->termAfter;
    report.steps.push_back(std::move(*step));
  }
  report.statsAfter = countStepsToDepth(cur, opts.verifyDepth, opts.fuel);
  return {cur, std::move(report)};
}

}  // namespace letrecopt
