#include <algorithm>
#include <random>

#include "doctest.h"
#include "letrecopt/corpus.hpp"
#include "letrecopt/equivalence.hpp"
#include "letrecopt/typing.hpp"
#include "oracles/generators.hpp"

using namespace letrecopt;

namespace {

Verdict eq(const std::string& a, const std::string& b, std::size_t depth) {
  return checkOpEq(parse(a), parse(b), depth);
}

}  // namespace

TEST_CASE("verdicts on small pairs") {
  CHECK(eq("\\x. x", "\\y. y", 4).equivalent());
  Verdict v = eq("\\x. x", "\\x. \\y. x", 2);
  CHECK(v.distinct());
  CHECK(v.witness.empty());
  Verdict w = eq("letrec w = w in w", "letrec w = w in w", 3);
  CHECK(w.kind == Verdict::Kind::Inconclusive);
  CHECK(w.reason.find("fuel") != std::string::npos);
  Verdict deep = eq("cons a (cons b c)", "cons a (cons d c)", 4);
  CHECK(deep.distinct());
  CHECK(deep.witness == std::vector<std::size_t>{1, 0});
  CHECK(eq("cons a (cons b c)", "cons a (cons d c)", 1).equivalent());
}

TEST_CASE("corpus pairs are equivalent") {
  for (const CorpusEntry& e : loadCorpus(LETRECOPT_CORPUS_DIR)) {
    if (!e.expectedOptimized) continue;
    INFO(e.name);
    CHECK(checkOpEq(e.term, *e.expectedOptimized, 8).equivalent());
    CHECK(checkOpEq(instantiate(e.term, e.bench), instantiate(*e.expectedOptimized, e.bench), 8).equivalent());
  }
}

TEST_CASE("repeat and its optimized form at depth six") {
  Verdict v = checkOpEq(loadTerm(LETRECOPT_CORPUS_DIR "/repeat.ll"), loadTerm(LETRECOPT_CORPUS_DIR "/repeat_opt.ll"), 6);
  CHECK(v.kind == Verdict::Kind::EquivalentToDepth);
  CHECK(v.depth == 6);
}

TEST_CASE("prefix copies with and without permutation compare equal") {
  std::mt19937 rng(21);
  int checked = 0;
  for (int i = 0; i < 300 && checked < 60; ++i) {
    auto [lhs, rhs, permuted] = oracles::randomPrefixCopy(rng);
    if (!isTypable(rhs)) continue;
    INFO(print(lhs));
    for (std::size_t d = 0; d <= 6; ++d) CHECK(checkOpEq(lhs, rhs, d).equivalent());
    const RedexKind kind = permuted ? RedexKind::VecEta0Perm : RedexKind::VecEta0;
    auto redexes = findRedexes(lhs, {kind});
    auto root = std::find_if(redexes.begin(), redexes.end(), [](const Redex& r) { return r.at.empty(); });
    REQUIRE(root != redexes.end());
    CHECK(alphaEq(contract(lhs, *root), rhs));
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("verdicts survive reducing one side") {
  auto corpus = loadCorpus(LETRECOPT_CORPUS_DIR);
  std::vector<Term> terms;
  for (const CorpusEntry& e : corpus) {
    terms.push_back(instantiate(e.term, e.bench));
    if (e.expectedOptimized) terms.push_back(instantiate(*e.expectedOptimized, e.bench));
  }
  const RedexKinds kinds{RedexKind::Beta, RedexKind::GBeta, RedexKind::UnfoldBody, RedexKind::UnfoldGarbage};
  std::mt19937 rng(99);
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const Verdict before = checkOpEq(terms[i], terms[j], 5);
      if (before.kind == Verdict::Kind::Inconclusive) continue;
      distinct += before.distinct() ? 1 : 0;
      Term r = terms[j];
      for (int s = 0; s < 4; ++s) {
        auto redexes = findRedexes(r, kinds);
        if (redexes.empty()) break;
        r = contract(r, redexes[rng() % redexes.size()]);
      }
      const Verdict after = checkOpEq(terms[i], r, 5);
      INFO(print(terms[i]) << " vs " << print(r));
      CHECK(after.kind == before.kind);
    }
  }
  CHECK(distinct > 0);
}

TEST_CASE("applicative experiments") {
  CHECK(applicativeExperiments(parse("\\x. x"), parse("\\y. y"), 6, 1).equivalent());
  Verdict v = applicativeExperiments(parse("\\x. x"), parse("a"), 3, 1);
  CHECK(v.distinct());
  CHECK(v.witness == std::vector<std::size_t>{0});
  CHECK(applicativeExperiments(parse("\\x. \\y. x"), parse("\\x. x"), 6, 3).distinct());
  CHECK(experimentProbes().size() >= 4);
  Term mutual = loadTerm(LETRECOPT_CORPUS_DIR "/mutual.ll");
  Term mutualOpt = loadTerm(LETRECOPT_CORPUS_DIR "/mutual_opt.ll");
  CHECK_FALSE(applicativeExperiments(mutual, mutualOpt, 5, 42).distinct());
  Verdict a = applicativeExperiments(parse("\\x. \\y. x"), parse("\\x. \\y. y"), 4, 7);
  Verdict b = applicativeExperiments(parse("\\x. \\y. x"), parse("\\x. \\y. y"), 4, 7);
  CHECK(a.kind == b.kind);
  CHECK(a.witness == b.witness);
}

TEST_CASE("the two oracles never contradict each other on the corpus") {
  auto corpus = loadCorpus(LETRECOPT_CORPUS_DIR);
  std::vector<Term> terms;
  for (const CorpusEntry& e : corpus) {
    terms.push_back(e.term);
    if (e.expectedOptimized) terms.push_back(*e.expectedOptimized);
  }
  for (const Term& a : terms) {
    for (const Term& b : terms) {
      if (applicativeExperiments(a, b, 5, 42).distinct()) {
        INFO(print(a) << " vs " << print(b));
        CHECK_FALSE(checkOpEq(a, b, 8).equivalent());
      }
    }
  }
}
