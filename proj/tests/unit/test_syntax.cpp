#include <random>

#include "doctest.h"
#include "letrecopt/syntax.hpp"
#include "support.hpp"

using namespace letrecopt;

TEST_CASE("parse identity") {
  Term t = parse("\\x. x");
  REQUIRE(t.isAbs());
  CHECK(t.binder() == "x");
  CHECK(t.body() == Term::var("x"));
}

TEST_CASE("parse repeat") {
  Term t = parse("letrec repeat = \\x. cons x (repeat x) in repeat");
  REQUIRE(t.isLetrec());
  REQUIRE(t.defCount() == 1);
  CHECK(t.defName(0) == "repeat");
  CHECK(t.defBody(0).isAbs());
  CHECK(t.body() == Term::var("repeat"));
}

TEST_CASE("parse rejects duplicate letrec names") {
  try {
    parse("letrec f = \\x. f x; f = \\y. y in f");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 21);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("\\. x"), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("letrec in x"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("f\n  (x");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("comments and lambda sign") {
  Term a = parse("-- header\n\xCE\xBBx y. x -- tail\n");
  CHECK(a == parse("\\x. \\y. x"));
}

TEST_CASE("print") {
  CHECK(print(Term::abs("x", Term::var("x"))) == "\\x. x");
  CHECK(print(Term::app(Term::app(Term::var("f"), Term::var("a")), Term::var("b"))) == "f a b");
  CHECK(print(parse("f (g a) b")) == "f (g a) b");
  CHECK(print(parse("(\\x. x) a")) == "(\\x. x) a");
  CHECK(print(parse("letrec a = b; b = a in a")) == "letrec a = b; b = a in a");
}

TEST_CASE("print/parse round trip on generated terms") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    Term t = testsupport::randomTerm(rng, 5);
    Term back = parse(print(t));
    INFO(print(t));
    CHECK(back == t);
  }
}

TEST_CASE("ensureDistinctlyBound") {
  CHECK(ensureDistinctlyBound(parse("\\x. \\x. x")) == parse("\\x. \\x1. x1"));
  CHECK(ensureDistinctlyBound(parse("y (\\y. y)")) == parse("y (\\y1. y1)"));
  Term ok = parse("\\a. \\b. a b");
  CHECK(ensureDistinctlyBound(ok).sameNode(ok));
  CHECK(isDistinctlyBound(ok));
  CHECK_FALSE(isDistinctlyBound(parse("\\x. \\x. x")));

  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    Term t = testsupport::randomTerm(rng, 5);
    Term d = ensureDistinctlyBound(t);
    INFO(print(t));
    CHECK(isDistinctlyBound(d));
    CHECK(alphaEq(d, t));
    CHECK(ensureDistinctlyBound(d) == d);
    CHECK(freeVars(d) == freeVars(t));
  }
}

TEST_CASE("freeVars") {
  CHECK(freeVars(parse("\\x. x y")) == NameSet{"y"});
  CHECK(freeVars(parse("letrec f = g f in f")) == NameSet{"g"});
  CHECK(freeVars(parse("x")) == NameSet{"x"});
}

TEST_CASE("substitute") {
  CHECK(substitute(parse("x (\\y. x)"), "x", parse("z")) == parse("z (\\y. z)"));
  CHECK(substitute(parse("\\y. x"), "x", parse("y")) == parse("\\y1. y"));
  Term t = parse("\\a. a b");
  CHECK(substitute(t, "x", parse("q")).sameNode(t));
  CHECK(substitute(parse("letrec f = x f in f x"), "x", parse("f")) ==
        parse("letrec f1 = f f1 in f1 f"));
}

TEST_CASE("substitution never captures free variables of the argument") {
  std::mt19937 rng(3);
  for (int i = 0; i < 300; ++i) {
    Term t = testsupport::randomTerm(rng, 5);
    Term d = testsupport::randomTerm(rng, 3);
    Term r = substitute(t, "a", d);
    // Capture would bind a free variable of d: check via a marker variable.
    Term marked = substitute(t, "a", Term::var("zz_marker"));
    Term viaMarker = substitute(marked, "zz_marker", d);
    INFO(print(t), " := ", print(d));
    CHECK(alphaEq(r, viaMarker));
    NameSet expected = freeVars(t);
    if (expected.erase("a")) {
      for (const auto& v : freeVars(d)) expected.insert(v);
    }
    CHECK(freeVars(r) == expected);
  }
}

TEST_CASE("alphaEq") {
  CHECK(alphaEq(parse("\\x. x"), parse("\\y. y")));
  CHECK_FALSE(alphaEq(parse("\\x. \\y. x"), parse("\\x. \\y. y")));
  Term rep = parse("letrec repeat = \\x. cons x (repeat x) in repeat");
  CHECK(alphaEq(rep, parse("letrec r = \\z. cons z (r z) in r")));
  CHECK_FALSE(alphaEq(rep, parse("letrec r = \\z. cons z (r z) in cons")));
  CHECK_FALSE(alphaEq(parse("letrec a = b; b = a in a"), parse("letrec b = a; a = b in a")));
}

TEST_CASE("positions") {
  Term t = parse("letrec f = \\x. g x in f a");
  Position p = positionFromString("def0.body.arg");
  CHECK(positionToString(p) == "def0.body.arg");
  CHECK(subtermAt(t, p) == Term::var("x"));
  CHECK(positionToString({}) == "root");
  CHECK(positionFromString("root").empty());
  CHECK_THROWS_AS(subtermAt(t, positionFromString("fun")), std::out_of_range);
  CHECK(replaceAt(t, positionFromString("body.arg"), Term::var("b")) == parse("letrec f = \\x. g x in f b"));
}

TEST_CASE("tagOrigins numbers nodes in pre-order") {
  auto [tagged, positions] = tagOrigins(parse("(\\x. x) a"));
  REQUIRE(positions.size() == 4);
  CHECK(tagged.origin() == 1);
  CHECK(tagged.fun().origin() == 2);
  CHECK(tagged.fun().body().origin() == 3);
  CHECK(tagged.arg().origin() == 4);
  CHECK(positionToString(positions[3]) == "arg");
}
