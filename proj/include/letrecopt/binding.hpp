#pragma once

// Annotated types and the binding graph. An edge e -> x records that a
// descendant of e may become bound to the binder x during evaluation.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "letrecopt/dominators.hpp"
#include "letrecopt/syntax.hpp"
#include "letrecopt/typing.hpp"

namespace letrecopt {

class AnnotatedType {
 public:
  static AnnotatedType base(std::string name = "i");
  static AnnotatedType arrow(AnnotatedType from, AnnotatedType to, std::optional<VarName> ann = std::nullopt);
  /// Same shape as `t`, every arrow annotated with ε.
  static AnnotatedType unannotated(const BareType& t);

  bool isBase() const { return !from_; }
  bool isArrow() const { return static_cast<bool>(from_); }
  const std::string& baseName() const { return name_; }
  const AnnotatedType& from() const { return *from_; }
  const AnnotatedType& to() const { return *to_; }
  /// Arrow annotation; nullopt is ε.
  const std::optional<VarName>& annotation() const { return ann_; }

  BareType bare() const;

  friend bool operator==(const AnnotatedType& a, const AnnotatedType& b);

 private:
  std::string name_;
  std::shared_ptr<const AnnotatedType> from_;
  std::shared_ptr<const AnnotatedType> to_;
  std::optional<VarName> ann_;
};

/// "(i^e -> i)^x" style rendering; ε is written "e".
std::string printAnnotated(const AnnotatedType& t);

struct DecoratedTerm {
  Term term;
  std::map<Position, AnnotatedType> types;
  /// Final annotated type of every letrec-defined name.
  std::map<VarName, AnnotatedType> letrecEnv;
  /// Global passes over the term until the letrec environment was stable,
  /// the confirming pass included.
  std::size_t iterations = 0;

  const AnnotatedType& rootType() const { return types.at({}); }
};

/// Least fixpoint of the annotation flow, starting from an all-ε letrec
/// environment.
DecoratedTerm decorate(const TypedTerm& tt);
/// Continues the fixpoint from a given letrec environment; starting from a
/// stable one finishes in a single pass.
DecoratedTerm decorate(const TypedTerm& tt, const std::map<VarName, AnnotatedType>& initialEnv);

struct BindingNode {
  enum class Kind { Variable, Expression, Blackhole };
  Kind kind;
  /// Variable: the binder. Expression: the printed argument.
  std::string label;
  /// Expression: position of the argument occurrence.
  Position at;
};

class BindingGraph {
 public:
  using NodeId = std::size_t;

  BindingGraph() = default;

  NodeId addVariable(const VarName& x);
  NodeId addExpression(const Position& at, std::string label);
  NodeId addBlackhole();
  /// Records x ⊳ source as the edge source -> x.
  void bind(const VarName& x, NodeId source);

  std::size_t nodeCount() const { return nodes_.size(); }
  const BindingNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<BindingNode>& nodes() const { return nodes_; }
  std::optional<NodeId> variable(const VarName& x) const;
  std::optional<NodeId> expression(const Position& at) const;
  std::optional<NodeId> blackhole() const { return blackhole_; }

  const std::set<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
  bool hasEdge(NodeId from, NodeId to) const { return edges_.contains({from, to}); }
  /// Edges as (binder, source label) pairs; the blackhole is "BLACKHOLE".
  std::set<std::pair<VarName, std::string>> relation() const;

  Digraph digraph() const;

 private:
  std::vector<BindingNode> nodes_;
  std::map<VarName, NodeId> vars_;
  std::map<Position, NodeId> exprs_;
  std::optional<NodeId> blackhole_;
  std::set<std::pair<NodeId, NodeId>> edges_;
};

/// Builds the graph from a decoration. Node order: variable nodes by binder
/// pre-order, expression nodes by argument position, then the blackhole.
BindingGraph bindingGraph(const DecoratedTerm& dt);

/// Convenience: ensure distinct binding, infer, decorate, build.
struct Analysis {
  Term term;
  TypedTerm typed;
  DecoratedTerm decorated;
  BindingGraph graph;
};
Analysis analyze(const Term& t, const TypeEnv& sig = {});

/// Simple cycles through variable nodes only, each rotated to start at its
/// smallest name; sorted.
std::vector<std::vector<VarName>> parameterCycles(const BindingGraph& g);

std::string toDot(const BindingGraph& g);

}  // namespace letrecopt
