#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "lamshift/parse.hpp"
#include "lamshift/term.hpp"
#include "support/gen.hpp"

using namespace lamshift;
using testgen::Gen;
using testgen::GenOptions;

TEST_CASE("constructors and predicates") {
  Term id = mkLam("x", mkVar("x"));
  CHECK(isValue(id));
  CHECK(isValue(mkVar("x")));
  CHECK_FALSE(isValue(mkApp(id, id)));
  CHECK_FALSE(isValue(mkReset(id)));
  CHECK_FALSE(isValue(mkShift("k", mkVar("k"))));

  CHECK(isPlain(mkReset(mkApp(id, id))));
  CHECK_FALSE(isPlain(mkCtxApp("a", id)));
  CHECK_FALSE(isPlain(mkLam("x", mkCtxApp("a", mkVar("x")))));

  CHECK(isPure(id));
  CHECK(isPure(mkReset(mkApp(id, id))));
  CHECK(isPure(mkCtxApp("a", mkApp(id, id))));
  CHECK_FALSE(isPure(mkApp(id, id)));
  CHECK_FALSE(isPure(mkShift("k", mkVar("k"))));
}

TEST_CASE("termSize saturates at the cap") {
  Term id = mkLam("x", mkVar("x"));
  CHECK(termSize(id) == 2);
  Term t = mkApp(id, id);
  CHECK(termSize(t) == 5);
  CHECK(termSize(t, 3) >= 3);  // capped, but never under-reports the cap
  // shared subterm counted per occurrence
  Term big = t;
  for (int i = 0; i < 5; ++i) big = mkApp(big, big);
  CHECK(termSize(big) == 32 * 5 + 31);
}

TEST_CASE("freeVars") {
  Term t = parseTerm("\\x. x y < S k. k z >");
  VarSets fv = freeVars(t);
  CHECK(fv.vars == std::set<VarId>{"y", "z"});
  CHECK(fv.ctxVars.empty());
  VarSets fv2 = freeVars(parseTerm("@a< x >"));
  CHECK(fv2.vars == std::set<VarId>{"x"});
  CHECK(fv2.ctxVars == std::set<CtxVarId>{"a"});
}

TEST_CASE("alphaEq basics") {
  CHECK(alphaEq(parseTerm("\\x. x"), parseTerm("\\y. y")));
  CHECK(alphaEq(parseTerm("S k. k x"), parseTerm("S j. j x")));
  CHECK_FALSE(alphaEq(parseTerm("x"), parseTerm("y")));
  CHECK_FALSE(alphaEq(parseTerm("@a< x >"), parseTerm("@b< x >")));
  CHECK_FALSE(alphaEq(parseTerm("\\x. x y"), parseTerm("\\x. x z")));
  // bound against free
  CHECK_FALSE(alphaEq(parseTerm("\\x. x"), parseTerm("\\x. y")));
  // shadowing
  CHECK(alphaEq(parseTerm("\\x. \\x. x"), parseTerm("\\a. \\b. b")));
  CHECK_FALSE(alphaEq(parseTerm("\\x. \\x. x"), parseTerm("\\a. \\b. a")));
}

TEST_CASE("alphaEq is an equivalence respected by shuffling (property)") {
  Gen g(101);
  for (int i = 0; i < 1000; ++i) {
    Term t = testgen::genTerm(g);
    Term s = testgen::alphaShuffle(t);
    CHECK(alphaEq(t, t));
    CHECK(alphaEq(t, s));
    CHECK(alphaEq(s, t));
    CHECK(termKey(t) == termKey(s));
  }
}

TEST_CASE("print and parse round trip (property)") {
  Gen g(202);
  for (int i = 0; i < 1000; ++i) {
    Term t = testgen::genTerm(g);
    Term back = parseTerm(printTerm(t));
    CHECK(alphaEq(t, back));
  }
}

TEST_CASE("substValue hand cases") {
  Term v = parseTerm("\\z. z z");
  CHECK(alphaEq(substValue(parseTerm("x x"), "x", v), parseTerm("(\\z. z z) (\\z. z z)")));
  // no capture: the binder is renamed away from the payload's free vars
  Term t = parseTerm("\\y. x y");
  Term r = substValue(t, "x", parseTerm("y"));
  CHECK(alphaEq(r, parseTerm("\\q. y q")));
  // binder shadows
  CHECK(alphaEq(substValue(parseTerm("\\x. x"), "x", v), parseTerm("\\x. x")));
  // under shift
  CHECK(alphaEq(substValue(parseTerm("S k. k x"), "x", v),
                parseTerm("S k. k (\\z. z z)")));
}

TEST_CASE("substitution respects alpha (property)") {
  Gen g(303);
  Term payload = parseTerm("\\p. p u");
  for (int i = 0; i < 500; ++i) {
    Term t = testgen::genTerm(g);
    Term s = testgen::alphaShuffle(t);
    CHECK(alphaEq(substValue(t, "u", payload), substValue(s, "u", payload)));
  }
}

TEST_CASE("substitution commutes (property)") {
  // t{v/u}{w/v} = t{w/v}{ v{w/v} /u}  when u not free in w
  Gen g(404);
  GenOptions opt;
  opt.depth = 4;
  for (int i = 0; i < 500; ++i) {
    Term t = testgen::genTerm(g, opt);
    Term vv = testgen::genValue(g, opt);
    Term wv = testgen::genClosedTerm(g, 3);
    if (!isValue(wv)) wv = mkLam("x", wv);
    Term lhs = substValue(substValue(t, "u", vv), "v", wv);
    Term rhs = substValue(substValue(t, "v", wv), "u", substValue(vv, "v", wv));
    CHECK(alphaEq(lhs, rhs));
  }
}

namespace {

// Structural reference for context substitution; assumes the context's
// free variables cannot be captured, which the test arranges by using
// disjoint name alphabets.
Term naiveSubstCtx(const Term& t, const CtxVarId& a, const EvalCtx& d) {
  if (is<Var>(t)) return t;
  if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    return mkLam(n.binder, naiveSubstCtx(n.body, a, d));
  }
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    return mkApp(naiveSubstCtx(n.fun, a, d), naiveSubstCtx(n.arg, a, d));
  }
  if (is<Shift>(t)) {
    const auto& n = as<Shift>(t);
    return mkShift(n.binder, naiveSubstCtx(n.body, a, d));
  }
  if (is<Reset>(t)) return mkReset(naiveSubstCtx(as<Reset>(t).body, a, d));
  const auto& n = as<CtxApp>(t);
  Term body = naiveSubstCtx(n.body, a, d);
  if (n.cvar == a) return plug(d, body);
  return mkCtxApp(n.cvar, body);
}

}  // namespace

TEST_CASE("substCtx agrees with the structural reference") {
  DefsTable defs;
  EvalCtx d = parseContext("(\\q. q q) (_ (\\q. q))");
  const char* samples[] = {
      "@a< x >",
      "@a< @a< x > >",
      "@b< @a< x y > >",
      "\\x. @a< x >",
      "< @a< S k. k x > >",
      "@a< x > @a< y >",
  };
  for (const char* s : samples) {
    Term t = parseTerm(s);
    CHECK(alphaEq(substCtx(t, "a", d), naiveSubstCtx(t, "a", d)));
  }
  // no occurrences: identity
  Term t = parseTerm("@b< x > (\\y. y)");
  CHECK(alphaEq(substCtx(t, "a", d), t));
}

TEST_CASE("substCtx avoids capturing context variables' term variables") {
  // D = [] q ; t = \q. @a< q >  : the binder must be renamed
  EvalCtx d = parseContext("_ q");
  Term t = parseTerm("\\q. @a< q >");
  Term r = substCtx(t, "a", d);
  CHECK(alphaEq(r, parseTerm("\\p. p q")));
}

TEST_CASE("plug, frames, composition") {
  EvalCtx inner = parseContext("_ x");
  EvalCtx outer = parseContext("(\\y. y) _");
  Term t = parseTerm("z");
  CHECK(alphaEq(plug(inner, t), parseTerm("z x")));
  CHECK(alphaEq(plug(outer, plug(inner, t)), parseTerm("(\\y. y) (z x)")));
  EvalCtx both = composeCtx(outer, inner);
  CHECK(alphaEq(plug(both, t), parseTerm("(\\y. y) (z x)")));
  CHECK(isPureCtx(both));
  EvalCtx withReset = both;
  withReset.frames.insert(withReset.frames.begin(), ResetF{});
  CHECK_FALSE(isPureCtx(withReset));
  CHECK(alphaEq(plug(withReset, t), parseTerm("(\\y. y) (< z > x)")));
}

TEST_CASE("composeCtx plug law (property)") {
  Gen g(505);
  GenOptions opt;
  opt.depth = 3;
  for (int i = 0; i < 300; ++i) {
    EvalCtx a = testgen::genPureCtx(g, static_cast<int>(g.pick(3)), opt);
    EvalCtx b = testgen::genPureCtx(g, static_cast<int>(g.pick(3)), opt);
    Term t = testgen::genTerm(g, opt);
    CHECK(alphaEq(plug(composeCtx(a, b), t), plug(a, plug(b, t))));
  }
}

TEST_CASE("freshVar picks the first unused numbered name") {
  CHECK(freshVar({}, "x") == "x0");
  CHECK(freshVar({"x0"}, "x") == "x1");
  CHECK(freshVar({"x0", "x2"}, "x") == "x1");
  CHECK(freshCtxVar({"a0"}) == "a1");
}

TEST_CASE("pair canonicalization is stable under joint renaming") {
  Term l = parseTerm("u (\\x. x v)");
  Term r = parseTerm("u v");
  std::string k1 = pairKey(l, r);
  // rename u -> q in both; the shared identity is preserved
  std::string k2 = pairKey(substValue(l, "u", mkVar("q")),
                           substValue(r, "u", mkVar("q")));
  CHECK(k1 == k2);
  // renaming only one side changes the relation between the sides
  std::string k3 = pairKey(substValue(l, "u", mkVar("q")), r);
  CHECK(k1 != k3);
  // identical vs distinct free variables differ
  CHECK(pairKey(parseTerm("x"), parseTerm("x")) !=
        pairKey(parseTerm("x"), parseTerm("y")));
}

TEST_CASE("pair canonicalization invariance (property)") {
  Gen g(606);
  for (int i = 0; i < 500; ++i) {
    Term l = testgen::genTerm(g);
    Term r = testgen::genTerm(g);
    std::string base = pairKey(l, r);
    CHECK(base == pairKey(testgen::alphaShuffle(l), testgen::alphaShuffle(r)));
    // joint injective renaming of a shared free variable
    Term l2 = substValue(l, "u", mkVar("q9"));
    Term r2 = substValue(r, "u", mkVar("q9"));
    CHECK(base == pairKey(l2, r2));
  }
}

TEST_CASE("printCtx shows the hole") {
  EvalCtx e = parseContext("(\\y. y) (_ x)");
  std::string s = printCtx(e);
  CHECK(s.find('_') != std::string::npos);
  // parse it back
  EvalCtx back = parseContext(s);
  Term probe = mkVar("z");
  CHECK(alphaEq(plug(e, probe), plug(back, probe)));
}
