#include "letrecopt/dominators.hpp"

#include <algorithm>
#include <deque>
#include <optional>

namespace letrecopt {

void Digraph::addEdge(Vertex from, Vertex to) {
  if (hasEdge(from, to)) return;
  succ_[from].push_back(to);
  pred_[to].push_back(from);
}

bool Digraph::hasEdge(Vertex from, Vertex to) const {
  const auto& s = succ_[from];
  return std::find(s.begin(), s.end(), to) != s.end();
}

namespace {

using Vertex = Digraph::Vertex;

// Vertices reachable from `start` by paths of length ≥ 0, never entering
// `avoid`; `backwards` follows edges in reverse.
std::vector<bool> sweep(const Digraph& g, Vertex start, bool backwards, std::optional<Vertex> avoid) {
  std::vector<bool> seen(g.size(), false);
  std::deque<Vertex> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex n : backwards ? g.predecessors(u) : g.successors(u)) {
      if (seen[n] || (avoid && n == *avoid)) continue;
      seen[n] = true;
      queue.push_back(n);
    }
  }
  return seen;
}

bool dominatesImpl(const Digraph& g, Vertex v, Vertex w, bool strong) {
  if (v == w) return !strong;
  std::vector<bool> fromV = sweep(g, v, false, std::nullopt);
  std::vector<bool> intoW = sweep(g, w, true, v);
  std::vector<bool> intoV = sweep(g, v, true, std::nullopt);
  for (Vertex u = 0; u < g.size(); ++u) {
    if (!intoW[u]) continue;
    if (!fromV[u]) return false;
    if (strong && intoV[u]) return false;
  }
  return true;
}

}  // namespace

Reachability::Reachability(const Digraph& g) : n_(g.size()), reach_(n_ * n_, false) {
  for (Vertex u = 0; u < n_; ++u) {
    std::deque<Vertex> queue(g.successors(u).begin(), g.successors(u).end());
    for (Vertex s : g.successors(u)) reach_[u * n_ + s] = true;
    while (!queue.empty()) {
      Vertex x = queue.front();
      queue.pop_front();
      for (Vertex y : g.successors(x)) {
        if (reach_[u * n_ + y]) continue;
        reach_[u * n_ + y] = true;
        queue.push_back(y);
      }
    }
  }
}

bool dominates(const Digraph& g, Vertex v, Vertex w) { return dominatesImpl(g, v, w, false); }

bool stronglyDominates(const Digraph& g, Vertex v, Vertex w) { return dominatesImpl(g, v, w, true); }

DomPairs strongDomFixpoint(const Digraph& g) {
  const std::size_t n = g.size();
  Reachability r(g);
  std::vector<bool> rel(n * n, false);
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w = 0; w < n; ++w) {
      rel[v * n + w] = v != w && r.plus(v, w) && !r.plus(w, v);
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Vertex v = 0; v < n; ++v) {
      for (Vertex w = 0; w < n; ++w) {
        if (!rel[v * n + w]) continue;
        for (Vertex u : g.predecessors(w)) {
          if (u != v && !rel[v * n + u]) {
            rel[v * n + w] = false;
            changed = true;
            break;
          }
        }
      }
    }
  }
  DomPairs out;
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w = 0; w < n; ++w) {
      if (rel[v * n + w]) out.emplace(v, w);
    }
  }
  return out;
}

DomPairs strongDomPathBased(const Digraph& g) {
  DomPairs out;
  for (Vertex v = 0; v < g.size(); ++v) {
    for (Vertex w = 0; w < g.size(); ++w) {
      if (stronglyDominates(g, v, w)) out.emplace(v, w);
    }
  }
  return out;
}

std::vector<Vertex> strongDominatorsOf(const Digraph& g, Vertex w) {
  std::vector<Vertex> out;
  for (const auto& [v, x] : strongDomFixpoint(g)) {
    if (x == w) out.push_back(v);
  }
  return out;
}

}  // namespace letrecopt
