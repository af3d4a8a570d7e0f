#include <functional>
#include <random>

#include "doctest.h"
#include "letrecopt/corpus.hpp"
#include "letrecopt/reduction.hpp"
#include "letrecopt/typing.hpp"
#include "support.hpp"

using namespace letrecopt;

namespace {

std::string rootType(const std::string& src, const TypeEnv& sig = {}) {
  return printType(inferTypes(parse(src), sig).rootType());
}

std::string errorOf(const std::string& src, const TypeEnv& sig = {}) {
  try {
    inferTypes(parse(src), sig);
  } catch (const TypeError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("types print and parse") {
  BareType t = parseType("(i -> i) -> i -> i");
  CHECK(printType(t) == "(i -> i) -> i -> i");
  CHECK(t.arity() == 2);
  CHECK(parseType("i->(i->i)") == parseType("i -> i -> i"));
  CHECK_THROWS_AS(parseType("i ->"), ParseError);
}

TEST_CASE("signatures") {
  TypeEnv sig = parseSignature("-- constructors\ncons : i -> i -> i\npred : i -> i\n");
  CHECK(sig.size() == 2);
  CHECK(printType(sig.at("cons")) == "i -> i -> i");
  CHECK_THROWS_AS(parseSignature("cons : i\ncons : i"), ParseError);
  CHECK_THROWS_AS(parseSignature("9x : i"), ParseError);
}

TEST_CASE("inference on small terms") {
  CHECK(rootType("\\x. x") == "i -> i");
  CHECK(rootType("\\f. \\x. f (f x)") == "(i -> i) -> i -> i");
  CHECK(errorOf("\\x. x x").find("untypable") != std::string::npos);
  CHECK(errorOf("letrec f = f f in f").find("untypable") != std::string::npos);
}

TEST_CASE("repeat with a constructor signature") {
  TypeEnv sig = parseSignature("cons : i -> i -> i");
  TypedTerm tt = inferTypes(parse("letrec repeat = \\x. cons x (repeat x) in repeat"), sig);
  CHECK(printType(tt.rootType()) == "i -> i");
  CHECK(printType(tt.binders.at("x")) == "i");
  CHECK(printType(tt.binders.at("repeat")) == "i -> i");
}

TEST_CASE("signature conflicts are reported as mismatches") {
  TypeEnv sig = parseSignature("cons : i -> i -> i");
  CHECK(errorOf("cons (\\y. y)", sig).find("signature mismatch") != std::string::npos);
  CHECK(isTypable(parse("cons (\\y. y)")));
  CHECK_FALSE(isTypable(parse("cons (\\y. y)"), sig));
}

TEST_CASE("every position carries a type") {
  Term t = parse("letrec map = \\f. \\xs. caseL xs (\\h. \\t. cons (f h) (map f t)) nil in map");
  TypedTerm tt = inferTypes(t);
  std::size_t n = 0;
  std::function<void(const Term&, Position&)> walk = [&](const Term& u, Position& p) {
    CHECK(tt.types.count(p) == 1);
    ++n;
    switch (u.kind()) {
      case TermKind::Var:
        break;
      case TermKind::Abs:
        p.push_back(bodyStep());
        walk(u.body(), p);
        p.pop_back();
        break;
      case TermKind::App:
        p.push_back(funStep());
        walk(u.fun(), p);
        p.back() = argStep();
        walk(u.arg(), p);
        p.pop_back();
        break;
      case TermKind::Letrec:
        for (std::uint32_t i = 0; i < u.defCount(); ++i) {
          p.push_back(defStep(i));
          walk(u.defBody(i), p);
          p.pop_back();
        }
        p.push_back(bodyStep());
        walk(u.body(), p);
        p.pop_back();
        break;
    }
  };
  Position root;
  walk(t, root);
  CHECK(tt.types.size() == n);
}

TEST_CASE("typability is invariant under renaming") {
  std::mt19937 rng(7);
  int typed = 0;
  for (int i = 0; i < 400; ++i) {
    Term t = testsupport::randomTerm(rng, 5);
    Term u = ensureDistinctlyBound(t);
    REQUIRE(alphaEq(t, u));
    bool a = isTypable(t);
    CHECK(a == isTypable(u));
    if (a) {
      ++typed;
      CHECK(inferTypes(t).rootType() == inferTypes(u).rootType());
    }
  }
  CHECK(typed > 20);
}

TEST_CASE("subject reduction on the corpus") {
  const RedexKinds kinds{RedexKind::Beta, RedexKind::GBeta, RedexKind::UnfoldBody, RedexKind::UnfoldGarbage};
  for (const CorpusEntry& e : loadCorpus(LETRECOPT_CORPUS_DIR)) {
    std::vector<Term> terms{e.term};
    if (e.expectedOptimized) terms.push_back(*e.expectedOptimized);
    for (const Term& t : terms) {
      INFO(print(t));
      BareType ty = inferTypes(t, e.sig).rootType();
      Term cur = t;
      for (int round = 0; round < 3; ++round) {
        auto redexes = findRedexes(cur, kinds);
        for (const Redex& r : redexes) {
          Term next = contract(cur, r);
          INFO(redexKindName(r.kind) << " at " << positionToString(r.at));
          REQUIRE(isTypable(next, e.sig));
          CHECK(inferTypes(next, e.sig).rootType() == ty);
        }
        if (redexes.empty()) break;
        cur = contract(cur, redexes.front());
      }
    }
  }
}
