// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "letrecopt/corpus.hpp"
#include "letrecopt/dominators.hpp"
#include "letrecopt/transform.hpp"
#include "oracles/generators.hpp"
#include "oracles/spine_search.hpp"

using namespace letrecopt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kCorpus = LETRECOPT_CORPUS_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

CorpusEntry entry(const std::vector<CorpusEntry>& corpus, const std::string& name) {
  for (const CorpusEntry& e : corpus) {
    if (e.name == name) return e;
  }
  throw std::runtime_error("corpus entry missing: " + name);
}

OptResult optimizeEntry(const CorpusEntry& e) {
  OptOptions o;
  o.sig = e.sig;
  return optimize(e.term, o);
}

// 1. Savings with ten-element inputs at depth 12.
Outcome stepSavings(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  const std::pair<const char*, long long> expected[] = {{"map", 10}, {"append", 10}, {"until", 20}};
  for (const auto& [name, want] : expected) {
    auto start = Clock::now();
    CorpusEntry e = entry(corpus, name);
    Term opt = optimizeEntry(e).term;
    auto before = countStepsToDepth(instantiate(e.term, e.bench), 12);
    auto after = countStepsToDepth(instantiate(opt, e.bench), 12);
    double t = seconds(start);
    long long saved = static_cast<long long>(before.betaSteps) - static_cast<long long>(after.betaSteps);
    o.detail << ' ' << name << ' ' << before.betaSteps << "->" << after.betaSteps << " saved " << saved << '/' << want
             << " (" << t << " s);";
    o.require(saved == want, std::string(name) + " saved " + std::to_string(saved));
    o.require(!before.fuelExhausted && !after.fuelExhausted, std::string(name) + " ran out of fuel");
    o.require(t < 1.0, std::string(name) + " took " + std::to_string(t) + " s");
  }
  return o;
}

// 2. Optimized repeat needs one β regardless of depth.
Outcome repeatClaim(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  CorpusEntry e = entry(corpus, "repeat");
  Term opt = optimizeEntry(e).term;
  const Term c = Term::var("c");
  for (std::size_t d = 2; d <= 20; ++d) {
    auto a = countStepsToDepth(Term::app(e.term, c), d);
    auto b = countStepsToDepth(Term::app(opt, c), d);
    o.require(a.betaSteps == d, "original at depth " + std::to_string(d) + " took " + std::to_string(a.betaSteps));
    o.require(b.betaSteps == 1, "optimized at depth " + std::to_string(d) + " took " + std::to_string(b.betaSteps));
  }
  o.detail << " depths 2..20: original d, optimized 1;";
  return o;
}

// 3. Binding graph of repeat.
Outcome repeatGraph(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  CorpusEntry e = entry(corpus, "repeat");
  Analysis a = analyze(e.term, e.sig);
  auto rel = a.graph.relation();
  o.require(rel == std::set<std::pair<VarName, std::string>>{{"x", "x"}, {"x", "BLACKHOLE"}}, "edge set");
  o.require(parameterCycles(a.graph) == std::vector<std::vector<VarName>>{{"x"}}, "cycles");
  o.detail << " edges {x>x, x>BLACKHOLE}, cycles [[x]];";
  return o;
}

// 4. Mutual recursion.
Outcome mutualAnalysis(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  CorpusEntry e = entry(corpus, "mutual");
  Analysis a = analyze(e.term, e.sig);
  auto rel = a.graph.relation();
  o.require(rel.contains({"y", "x"}) && rel.contains({"x", "y"}), "x and y bound to each other");
  const Digraph g = a.graph.digraph();
  auto hasA = [&](const VarName& v) {
    for (auto d : strongDominatorsOf(g, *a.graph.variable(v))) {
      const BindingNode& n = a.graph.node(d);
      if (n.kind == BindingNode::Kind::Expression && n.label == "a") return true;
    }
    return false;
  };
  o.require(hasA("x"), "a strongly dominates x");
  o.require(hasA("y"), "a strongly dominates y");
  OptResult r = optimizeEntry(e);
  const auto& gone = r.report.binderEliminated;
  o.require(std::find(gone.begin(), gone.end(), "x") != gone.end() &&
                std::find(gone.begin(), gone.end(), "y") != gone.end(),
            "both binders eliminated");
  Verdict v = checkOpEq(e.term, r.term, 8);
  o.require(v.kind == Verdict::Kind::EquivalentToDepth && v.depth == 8, printVerdict(v));
  o.detail << " optimized to " << print(r.term) << "; " << printVerdict(v) << ';';
  return o;
}

// 5. Transformation fidelity.
Outcome fidelity(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  CorpusEntry rep = entry(corpus, "repeat");
  Term r = optimizeEntry(rep).term;
  o.require(alphaEq(r, *rep.expectedOptimized), "repeat result " + print(r));
  CorpusEntry repl = entry(corpus, "replicate");
  Term p = optimizeEntry(repl).term;
  Verdict v = checkOpEq(p, *repl.expectedOptimized, 8);
  o.require(v.equivalent(), "replicate against its optimized form: " + printVerdict(v));
  for (const auto& cycle : parameterCycles(analyze(p, repl.sig).graph)) {
    o.require(std::find(cycle.begin(), cycle.end(), "x") == cycle.end(), "x still on a parameter cycle");
  }
  o.detail << " repeat alpha-equal to the shipped form; replicate " << printVerdict(v) << ", x on no cycle;";
  return o;
}

// 6. The two strong-domination algorithms agree.
Outcome dominatorOracles() {
  Outcome o;
  auto start = Clock::now();
  std::size_t graphs = 0, disagreements = 0;
  auto compare = [&](const Digraph& g) {
    ++graphs;
    if (strongDomFixpoint(g) != strongDomPathBased(g)) ++disagreements;
  };
  // Every graph on up to four vertices, self loops included.
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::uint64_t mask = 0; mask < (1ull << (n * n)); ++mask) {
      Digraph g(n);
      for (std::size_t i = 0; i < n * n; ++i) {
        if (mask >> i & 1) g.addEdge(i / n, i % n);
      }
      compare(g);
    }
  }
  // Every loop-free edge set on five vertices, each with a self-loop
  // pattern hashed from the edge set.
  for (std::uint64_t mask = 0; mask < (1ull << 20); ++mask) {
    Digraph g(5);
    std::size_t bit = 0;
    for (std::size_t u = 0; u < 5; ++u) {
      for (std::size_t v = 0; v < 5; ++v) {
        if (u == v) continue;
        if (mask >> bit & 1) g.addEdge(u, v);
        ++bit;
      }
    }
    const std::uint64_t loops = (mask * 2654435761u >> 7) & 31;
    for (std::size_t u = 0; u < 5; ++u) {
      if (loops >> u & 1) g.addEdge(u, u);
    }
    compare(g);
  }
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> density(0.05, 0.35);
  for (int i = 0; i < 1000; ++i) {
    std::bernoulli_distribution coin(density(rng));
    Digraph g(12);
    for (std::size_t u = 0; u < 12; ++u) {
      for (std::size_t v = 0; v < 12; ++v) {
        if (coin(rng)) g.addEdge(u, v);
      }
    }
    compare(g);
  }
  const double t = seconds(start);
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.require(t < 60.0, "took " + std::to_string(t) + " s");
  o.detail << ' ' << graphs << " graphs, " << disagreements << " disagreements, " << t << " s;";
  return o;
}

// 7. Approximations are preserved by every step.
Outcome propertySuite(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  std::size_t steps = 0, unfolds = 0, prefixCopies = 0;
  for (const CorpusEntry& e : corpus) {
    OptResult r = optimizeEntry(e);
    o.require(!r.report.aborted, e.name + " aborted: " + r.report.error);
    for (const OptStep& s : r.report.steps) {
      ++steps;
      for (std::size_t d = 0; d <= 8; ++d) {
        bool same = printApprox(boehmApprox(s.termBefore, d)) == printApprox(boehmApprox(s.termAfter, d)) &&
                    printApprox(boehmApprox(instantiate(s.termBefore, e.bench), d)) ==
                        printApprox(boehmApprox(instantiate(s.termAfter, e.bench), d));
        o.require(same, e.name + ": " + describe(s.candidate) + " at depth " + std::to_string(d));
      }
    }
    std::vector<Term> terms{e.term};
    if (e.expectedOptimized) terms.push_back(*e.expectedOptimized);
    for (const Term& t : terms) {
      for (const Redex& rx : findRedexes(t, {RedexKind::UnfoldBody})) {
        ++unfolds;
        Term u = contract(t, rx);
        for (std::size_t d = 0; d <= 8; ++d) {
          o.require(printApprox(boehmApprox(t, d)) == printApprox(boehmApprox(u, d)),
                    e.name + ": unfolding at " + positionToString(rx.at) + ", depth " + std::to_string(d));
        }
      }
    }
  }
  std::mt19937 rng(6);
  while (prefixCopies < 200) {
    auto [lhs, rhs, permuted] = oracles::randomPrefixCopy(rng);
    if (!isTypable(rhs)) continue;
    ++prefixCopies;
    Verdict v = checkOpEq(lhs, rhs, 6);
    o.require(v.kind == Verdict::Kind::EquivalentToDepth && v.depth == 6, print(lhs) + ": " + printVerdict(v));
  }
  o.detail << ' ' << steps << " optimizer steps and " << unfolds << " unfoldings at depths 0..8, " << prefixCopies
           << " prefix copies at depth 6;";
  return o;
}

std::size_t letrecDefinitions(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var: return 0;
    case TermKind::Abs: return letrecDefinitions(t.body());
    case TermKind::App: return letrecDefinitions(t.fun()) + letrecDefinitions(t.arg());
    case TermKind::Letrec: {
      std::size_t n = t.defCount() + letrecDefinitions(t.body());
      for (std::size_t i = 0; i < t.defCount(); ++i) n += letrecDefinitions(t.defBody(i));
      return n;
    }
  }
  return 0;
}

// 8. Decoration converges, is a fixpoint, and matches the naive search.
Outcome decoration(const std::vector<CorpusEntry>& corpus) {
  Outcome o;
  std::size_t maxIterations = 0;
  for (const CorpusEntry& e : corpus) {
    std::vector<Term> terms{e.term};
    if (e.expectedOptimized) terms.push_back(*e.expectedOptimized);
    for (const Term& t : terms) {
      Analysis a = analyze(t, e.sig);
      const std::size_t bound = letrecDefinitions(a.term) + 1;
      maxIterations = std::max(maxIterations, a.decorated.iterations);
      o.require(a.decorated.iterations <= bound, e.name + ": " + std::to_string(a.decorated.iterations) +
                                                     " passes for " + std::to_string(bound - 1) + " definitions");
      DecoratedTerm again = decorate(a.typed, a.decorated.letrecEnv);
      o.require(again.types == a.decorated.types && again.letrecEnv == a.decorated.letrecEnv,
                e.name + ": decoration not idempotent");
      o.require(oracles::described(a.graph) == oracles::naiveSpineSearch(a.term),
                e.name + ": graph differs from the naive search for " + print(a.term));
    }
  }
  o.detail << " at most " << maxIterations << " passes; idempotent; graphs match the spine search;";
  return o;
}

}  // namespace

int main() {
  const std::vector<CorpusEntry> corpus = loadCorpus(kCorpus);
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 step savings at depth 12", [&] { return stepSavings(corpus); }},
      {"2 optimized repeat needs one beta step", [&] { return repeatClaim(corpus); }},
      {"3 repeat binding graph", [&] { return repeatGraph(corpus); }},
      {"4 mutual recursion analysis and optimization", [&] { return mutualAnalysis(corpus); }},
      {"5 transformation fidelity", [&] { return fidelity(corpus); }},
      {"6 strong domination oracles agree", [] { return dominatorOracles(); }},
      {"7 approximation preservation", [&] { return propertySuite(corpus); }},
      {"8 decoration fixpoint and spine search", [&] { return decoration(corpus); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << " [exception: " << ex.what() << "]";
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ":" << o.detail.str() << std::endl;
  }
  std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
