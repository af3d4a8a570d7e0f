#pragma once

// Domination in graphs without a designated start node. v dominates w when
// every path into w that avoids v starts at a vertex reachable from v.

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

namespace letrecopt {

class Digraph {
 public:
  using Vertex = std::size_t;

  explicit Digraph(std::size_t n = 0) : succ_(n), pred_(n) {}

  std::size_t size() const { return succ_.size(); }
  void addEdge(Vertex from, Vertex to);
  bool hasEdge(Vertex from, Vertex to) const;
  const std::vector<Vertex>& successors(Vertex v) const { return succ_[v]; }
  const std::vector<Vertex>& predecessors(Vertex v) const { return pred_[v]; }

 private:
  std::vector<std::vector<Vertex>> succ_;
  std::vector<std::vector<Vertex>> pred_;
};

/// reach[u][v]: a path of length ≥ 1 leads from u to v.
class Reachability {
 public:
  explicit Reachability(const Digraph& g);
  /// Path of length ≥ 1.
  bool plus(Digraph::Vertex u, Digraph::Vertex v) const { return reach_[u * n_ + v]; }
  /// Path of length ≥ 0.
  bool star(Digraph::Vertex u, Digraph::Vertex v) const { return u == v || plus(u, v); }

 private:
  std::size_t n_;
  std::vector<bool> reach_;
};

using DomPairs = std::set<std::pair<Digraph::Vertex, Digraph::Vertex>>;

/// Path-based checks straight from the definition.
bool dominates(const Digraph& g, Digraph::Vertex v, Digraph::Vertex w);
bool stronglyDominates(const Digraph& g, Digraph::Vertex v, Digraph::Vertex w);

/// Greatest fixpoint: start from all v ≠ w with v ↠⁺ w and not w ↠⁺ v, then
/// drop (v, w) while some predecessor u ≠ v of w lacks (v, u).
DomPairs strongDomFixpoint(const Digraph& g);

/// All (v, w) with stronglyDominates(g, v, w), by the path-based check.
DomPairs strongDomPathBased(const Digraph& g);

/// Sorted strong dominators of w according to the fixpoint.
std::vector<Digraph::Vertex> strongDominatorsOf(const Digraph& g, Digraph::Vertex w);

}  // namespace letrecopt
