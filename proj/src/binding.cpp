#include "letrecopt/binding.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace letrecopt {

AnnotatedType AnnotatedType::base(std::string name) {
  AnnotatedType t;
  t.name_ = std::move(name);
  return t;
}

AnnotatedType AnnotatedType::arrow(AnnotatedType from, AnnotatedType to, std::optional<VarName> ann) {
  AnnotatedType t;
  t.from_ = std::make_shared<const AnnotatedType>(std::move(from));
  t.to_ = std::make_shared<const AnnotatedType>(std::move(to));
  t.ann_ = std::move(ann);
  return t;
}

AnnotatedType AnnotatedType::unannotated(const BareType& t) {
  if (t.isBase()) return base(t.baseName());
  return arrow(unannotated(t.from()), unannotated(t.to()));
}

BareType AnnotatedType::bare() const {
  if (isBase()) return BareType::base(name_);
  return BareType::arrow(from().bare(), to().bare());
}

bool operator==(const AnnotatedType& a, const AnnotatedType& b) {
  if (a.isArrow() != b.isArrow()) return false;
  if (a.isBase()) return a.name_ == b.name_;
  return a.ann_ == b.ann_ && a.from() == b.from() && a.to() == b.to();
}

std::string printAnnotated(const AnnotatedType& t) {
  if (t.isBase()) return t.baseName();
  return "(" + printAnnotated(t.from()) + " -> " + printAnnotated(t.to()) + ")^" + t.annotation().value_or("e");
}

namespace {

class Decorator {
 public:
  Decorator(const TypedTerm& tt, std::map<VarName, AnnotatedType> env) : env_(std::move(env)), tt_(tt) {}

  std::size_t run() {
    std::size_t passes = 0;
    for (;;) {
      ++passes;
      changed_ = false;
      types_.clear();
      Position pos;
      visit(tt_.term, pos);
      if (!changed_) return passes;
      // Annotations only ever go from ε to a name, so this is generous.
      if (passes > 64 + 4 * env_.size()) throw std::logic_error("decoration did not stabilize");
    }
  }

  std::map<Position, AnnotatedType> types_;
  std::map<VarName, AnnotatedType> env_;

 private:
  AnnotatedType visit(const Term& t, Position& pos) {
    AnnotatedType result = AnnotatedType::base();
    switch (t.kind()) {
      case TermKind::Var:
        if (lambda_.contains(t.name())) {
          result = AnnotatedType::unannotated(tt_.binders.at(t.name()));
        } else if (letrec_.contains(t.name())) {
          result = envOf(t.name());
        } else {
          result = AnnotatedType::unannotated(tt_.freeVars.at(t.name()));
        }
        break;
      case TermKind::Abs: {
        lambda_.insert(t.binder());
        pos.push_back(bodyStep());
        AnnotatedType body = visit(t.body(), pos);
        pos.pop_back();
        lambda_.erase(t.binder());
        result = AnnotatedType::arrow(AnnotatedType::unannotated(tt_.binders.at(t.binder())), body, t.binder());
        break;
      }
      case TermKind::App: {
        pos.push_back(funStep());
        AnnotatedType f = visit(t.fun(), pos);
        pos.back() = argStep();
        visit(t.arg(), pos);
        pos.pop_back();
        if (!f.isArrow()) throw std::logic_error("decorate: application of a non-function");
        result = f.to();
        break;
      }
      case TermKind::Letrec: {
        for (std::size_t i = 0; i < t.defCount(); ++i) letrec_.insert(t.defName(i));
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          pos.push_back(defStep(static_cast<std::uint32_t>(i)));
          AnnotatedType d = visit(t.defBody(i), pos);
          pos.pop_back();
          auto it = env_.find(t.defName(i));
          if (it == env_.end()) {
            env_.emplace(t.defName(i), d);
            changed_ = true;
          } else if (!(it->second == d)) {
            it->second = d;
            changed_ = true;
          }
        }
        pos.push_back(bodyStep());
        result = visit(t.body(), pos);
        pos.pop_back();
        for (std::size_t i = 0; i < t.defCount(); ++i) letrec_.erase(t.defName(i));
        break;
      }
    }
    types_.insert_or_assign(pos, result);
    return result;
  }

  AnnotatedType envOf(const VarName& f) {
    auto it = env_.find(f);
    if (it != env_.end()) return it->second;
    AnnotatedType t = AnnotatedType::unannotated(tt_.binders.at(f));
    env_.emplace(f, t);
    return t;
  }

  const TypedTerm& tt_;
  std::set<VarName> lambda_;
  std::set<VarName> letrec_;
  bool changed_ = false;
};

std::map<VarName, AnnotatedType> epsilonEnv(const TypedTerm& tt) {
  std::map<VarName, AnnotatedType> env;
  std::function<void(const Term&)> walk = [&](const Term& t) {
    switch (t.kind()) {
      case TermKind::Var: return;
      case TermKind::Abs: walk(t.body()); return;
      case TermKind::App: walk(t.fun()); walk(t.arg()); return;
      case TermKind::Letrec:
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          env.insert_or_assign(t.defName(i), AnnotatedType::unannotated(tt.binders.at(t.defName(i))));
          walk(t.defBody(i));
        }
        walk(t.body());
        return;
    }
  };
  walk(tt.term);
  return env;
}

}  // namespace

DecoratedTerm decorate(const TypedTerm& tt, const std::map<VarName, AnnotatedType>& initialEnv) {
  Decorator d(tt, initialEnv);
  DecoratedTerm out;
  out.iterations = d.run();
  out.term = tt.term;
  out.types = std::move(d.types_);
  out.letrecEnv = std::move(d.env_);
  return out;
}

DecoratedTerm decorate(const TypedTerm& tt) { return decorate(tt, epsilonEnv(tt)); }

// ---------------------------------------------------------------------------

BindingGraph::NodeId BindingGraph::addVariable(const VarName& x) {
  if (auto it = vars_.find(x); it != vars_.end()) return it->second;
  nodes_.push_back({BindingNode::Kind::Variable, x, {}});
  vars_.emplace(x, nodes_.size() - 1);
  return nodes_.size() - 1;
}

BindingGraph::NodeId BindingGraph::addExpression(const Position& at, std::string label) {
  if (auto it = exprs_.find(at); it != exprs_.end()) return it->second;
  nodes_.push_back({BindingNode::Kind::Expression, std::move(label), at});
  exprs_.emplace(at, nodes_.size() - 1);
  return nodes_.size() - 1;
}

BindingGraph::NodeId BindingGraph::addBlackhole() {
  if (!blackhole_) {
    nodes_.push_back({BindingNode::Kind::Blackhole, "BLACKHOLE", {}});
    blackhole_ = nodes_.size() - 1;
  }
  return *blackhole_;
}

void BindingGraph::bind(const VarName& x, NodeId source) { edges_.emplace(source, addVariable(x)); }

std::optional<BindingGraph::NodeId> BindingGraph::variable(const VarName& x) const {
  auto it = vars_.find(x);
  if (it == vars_.end()) return std::nullopt;
  return it->second;
}

std::optional<BindingGraph::NodeId> BindingGraph::expression(const Position& at) const {
  auto it = exprs_.find(at);
  if (it == exprs_.end()) return std::nullopt;
  return it->second;
}

std::set<std::pair<VarName, std::string>> BindingGraph::relation() const {
  std::set<std::pair<VarName, std::string>> out;
  for (const auto& [from, to] : edges_) out.emplace(nodes_[to].label, nodes_[from].label);
  return out;
}

Digraph BindingGraph::digraph() const {
  Digraph g(nodes_.size());
  for (const auto& [from, to] : edges_) g.addEdge(from, to);
  return g;
}

namespace {

struct PendingEdge {
  VarName target;
  enum class Source { Variable, Expression, Blackhole } source;
  VarName var;
  Position at;
  std::string label;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(const DecoratedTerm& dt) : dt_(dt) {}

  BindingGraph build() {
    Position pos;
    visit(dt_.term, pos);
    blackholes(dt_.rootType());

    BindingGraph g;
    for (const VarName& x : binders_) g.addVariable(x);
    std::map<Position, std::string> exprs;
    for (const PendingEdge& e : pending_) {
      if (e.source == PendingEdge::Source::Expression) exprs.emplace(e.at, e.label);
    }
    for (const auto& [at, label] : exprs) g.addExpression(at, label);
    auto hole = g.addBlackhole();
    for (const PendingEdge& e : pending_) {
      switch (e.source) {
        case PendingEdge::Source::Variable: g.bind(e.target, *g.variable(e.var)); break;
        case PendingEdge::Source::Expression: g.bind(e.target, *g.expression(e.at)); break;
        case PendingEdge::Source::Blackhole: g.bind(e.target, hole); break;
      }
    }
    return g;
  }

 private:
  void visit(const Term& t, Position& pos) {
    switch (t.kind()) {
      case TermKind::Var:
        return;
      case TermKind::Abs:
        binders_.push_back(t.binder());
        lambda_.insert(t.binder());
        pos.push_back(bodyStep());
        visit(t.body(), pos);
        pos.pop_back();
        lambda_.erase(t.binder());
        return;
      case TermKind::App: {
        pos.push_back(funStep());
        const AnnotatedType& f = dt_.types.at(pos);
        visit(t.fun(), pos);
        pos.back() = argStep();
        const AnnotatedType& a = dt_.types.at(pos);
        if (f.isArrow() && f.annotation()) {
          const Term arg = t.arg();
          if (arg.isVar() && lambda_.contains(arg.name())) {
            pending_.push_back({*f.annotation(), PendingEdge::Source::Variable, arg.name(), {}, {}});
          } else {
            pending_.push_back({*f.annotation(), PendingEdge::Source::Expression, {}, pos, print(arg)});
          }
        }
        blackholes(a);
        visit(t.arg(), pos);
        pos.pop_back();
        return;
      }
      case TermKind::Letrec:
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          pos.push_back(defStep(static_cast<std::uint32_t>(i)));
          visit(t.defBody(i), pos);
          pos.pop_back();
        }
        pos.push_back(bodyStep());
        visit(t.body(), pos);
        pos.pop_back();
        return;
    }
  }

  void blackholes(const AnnotatedType& t) {
    for (const AnnotatedType* cur = &t; cur->isArrow(); cur = &cur->to()) {
      if (cur->annotation()) {
        pending_.push_back({*cur->annotation(), PendingEdge::Source::Blackhole, {}, {}, {}});
      }
    }
  }

  const DecoratedTerm& dt_;
  std::vector<VarName> binders_;
  std::set<VarName> lambda_;
  std::vector<PendingEdge> pending_;
};

}  // namespace

BindingGraph bindingGraph(const DecoratedTerm& dt) { return GraphBuilder(dt).build(); }

Analysis analyze(const Term& t, const TypeEnv& sig) {
  Analysis a;
  a.term = ensureDistinctlyBound(t);
  a.typed = inferTypes(a.term, sig);
  a.decorated = decorate(a.typed);
  a.graph = bindingGraph(a.decorated);
  return a;
}

std::vector<std::vector<VarName>> parameterCycles(const BindingGraph& g) {
  // Variable subgraph, vertices ordered by name so each cycle is found once
  // from its smallest member.
  std::vector<BindingGraph::NodeId> vars;
  for (BindingGraph::NodeId i = 0; i < g.nodeCount(); ++i) {
    if (g.node(i).kind == BindingNode::Kind::Variable) vars.push_back(i);
  }
  std::sort(vars.begin(), vars.end(),
            [&](auto a, auto b) { return g.node(a).label < g.node(b).label; });
  const std::size_t n = vars.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.hasEdge(vars[i], vars[j])) succ[i].push_back(j);
    }
  }
  std::vector<std::vector<VarName>> out;
  std::vector<std::size_t> path;
  std::vector<bool> onPath(n, false);
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t start, std::size_t u) {
    for (std::size_t v : succ[u]) {
      if (v == start) {
        std::vector<VarName> cycle;
        for (std::size_t p : path) cycle.push_back(g.node(vars[p]).label);
        out.push_back(std::move(cycle));
      } else if (v > start && !onPath[v]) {
        onPath[v] = true;
        path.push_back(v);
        dfs(start, v);
        path.pop_back();
        onPath[v] = false;
      }
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    path = {s};
    onPath[s] = true;
    dfs(s, s);
    onPath[s] = false;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string dotEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string toDot(const BindingGraph& g) {
  if (g.nodeCount() == 0) return "digraph binding { }";
  std::ostringstream out;
  out << "digraph binding {\n";
  for (BindingGraph::NodeId i = 0; i < g.nodeCount(); ++i) {
    const BindingNode& n = g.node(i);
    out << "  n" << i << " [";
    switch (n.kind) {
      case BindingNode::Kind::Variable:
        out << "label=\"" << dotEscape(n.label) << "\", shape=ellipse";
        break;
      case BindingNode::Kind::Expression:
        out << "label=\"" << dotEscape(n.label) << "\", shape=box";
        break;
      case BindingNode::Kind::Blackhole:
        out << "label=\"\", shape=circle, style=filled, fillcolor=black, width=0.25";
        break;
    }
    out << "];\n";
  }
  for (const auto& [from, to] : g.edges()) out << "  n" << from << " -> n" << to << ";\n";
  out << "}";
  return out.str();
}

}  // namespace letrecopt
