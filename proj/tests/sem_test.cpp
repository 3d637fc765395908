#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "lamshift/nf_bisim.hpp"
#include "lamshift/parse.hpp"
#include "lamshift/sem.hpp"
#include "support/gen.hpp"

using namespace lamshift;
using testgen::Gen;
using testgen::GenOptions;

namespace {

DefsTable combinators() {
  return parseDefs(
      "i = \\x. x;\n"
      "omega = \\x. x x;\n"
      "Omega = omega omega;\n"
      "theta = \\x. \\y. y (\\z. ((x x) y) z);\n");
}

SemMode modeWith(Rules r = Rules::Global, Strategy s = Strategy::CBV,
                 Calculus c = Calculus::Plain, TopLevel tl = TopLevel::Relaxed) {
  SemMode m;
  m.rules = r;
  m.strategy = s;
  m.calculus = c;
  m.topLevel = tl;
  return m;
}

std::vector<std::string> traceRules(Term t, const SemMode& mode, int cap) {
  std::vector<std::string> rules;
  for (int n = 0; n < cap; ++n) {
    auto s = step(t, mode);
    if (!s) break;
    rules.push_back(s->rule);
    t = s->term;
  }
  return rules;
}

}  // namespace

TEST_CASE("reset with two shifts runs in six steps") {
  DefsTable defs = combinators();
  Term t = parseTerm("< ((S k1. i (k1 i)) (S k2. omega)) Omega >", defs);
  SemMode m;

  std::vector<std::string> rules = traceRules(t, m, 32);
  std::vector<std::string> want = {"shift", "beta_v", "shift",
                                   "reset", "beta_v", "reset"};
  CHECK(rules == want);

  EvalOutcome out = evaluate(t, m, 100);
  REQUIRE(std::holds_alternative<Normal>(out));
  const auto& n = std::get<Normal>(out);
  CHECK(n.steps == 6);
  CHECK(kindName(n.kind) == "value");
  CHECK(alphaEq(n.term, parseTerm("omega", defs)));
}

TEST_CASE("continuation grabbing fixed point settles to a value") {
  DefsTable defs = combinators();
  Term t = parseTerm("< theta (S k. k k) >", defs);
  EvalOutcome out = evaluate(t, SemMode{}, 100);
  REQUIRE(std::holds_alternative<Normal>(out));
  Term want = parseTerm(
      "\\y. y (\\z. (((\\x. < theta x >) (\\x. < theta x >)) y) z)", defs);
  CHECK(alphaEq(std::get<Normal>(out).term, want));
}

TEST_CASE("divergence is reported with a loop witness") {
  DefsTable defs = combinators();
  Term omega2 = parseTerm("Omega", defs);
  EvalOutcome out = evaluate(omega2, SemMode{}, 1000);
  REQUIRE(std::holds_alternative<Diverges>(out));
  CHECK(std::get<Diverges>(out).steps == 1);
  CHECK(alphaEq(std::get<Diverges>(out).loopWitness, omega2));

  // CBV evaluates the argument, CBN discards it
  Term discard = parseTerm("(\\x. i) Omega", defs);
  CHECK(std::holds_alternative<Diverges>(evaluate(discard, SemMode{}, 1000)));
  EvalOutcome cbn =
      evaluate(discard, modeWith(Rules::Global, Strategy::CBN), 1000);
  REQUIRE(std::holds_alternative<Normal>(cbn));
  CHECK(std::get<Normal>(cbn).steps == 1);
  CHECK(alphaEq(std::get<Normal>(cbn).term, parseTerm("i", defs)));
}

TEST_CASE("call-by-name leaves arguments untouched") {
  SemMode cbn = modeWith(Rules::Global, Strategy::CBN);
  Term t = parseTerm("(\\x. x) ((\\y. y) z)");
  auto s1 = step(t, cbn);
  REQUIRE(s1);
  CHECK(s1->rule == "beta_n");
  CHECK(alphaEq(s1->term, parseTerm("(\\y. y) z")));

  // open-stuck application with a non-value argument
  Term stuck = parseTerm("x ((\\y. y) z)");
  Decomposition d = decompose(stuck, cbn);
  REQUIRE(std::holds_alternative<NFKind>(d));
  const auto& k = std::get<NFKind>(d);
  REQUIRE(std::holds_alternative<OpenStuckNF>(k));
  CHECK(std::get<OpenStuckNF>(k).head == "x");
  CHECK_FALSE(isValue(std::get<OpenStuckNF>(k).arg));
}

TEST_CASE("capture builds the continuation without variable capture") {
  Term t = parseTerm("< (S k. k x0) x0 >");
  auto s = step(t, SemMode{});
  REQUIRE(s);
  CHECK(s->rule == "shift");
  CHECK(alphaEq(s->term, parseTerm("< (\\p. < p x0 >) x0 >")));
}

TEST_CASE("local rules rewrite one frame at a time") {
  DefsTable defs = combinators();
  SemMode local = modeWith(Rules::Local);
  Term t = parseTerm("< (S k. k i) omega >", defs);

  auto s1 = step(t, local);
  REQUIRE(s1);
  CHECK(s1->rule == "shift_elem");
  CHECK(alphaEq(s1->term,
                parseTerm("< S q. (\\p. < q (p omega) >) i >", defs)));

  auto s2 = step(s1->term, local);
  REQUIRE(s2);
  CHECK(s2->rule == "shift_empty");

  EvalOutcome out = evaluate(t, local, 100);
  REQUIRE(std::holds_alternative<Normal>(out));
  CHECK(alphaEq(std::get<Normal>(out).term, parseTerm("omega", defs)));

  // under local rules only a bare shift is control-stuck
  EvalOutcome bare = evaluate(parseTerm("(S k. k i) omega", defs), local, 100);
  REQUIRE(std::holds_alternative<Normal>(bare));
  const auto& bn = std::get<Normal>(bare);
  CHECK(kindName(bn.kind) == "control-stuck");
  CHECK(is<Shift>(bn.term));
  CHECK(std::get<ControlStuckNF>(bn.kind).ctx.frames.empty());
}

TEST_CASE("context variables delimit capture in the extended calculus") {
  DefsTable defs = combinators();
  SemMode ext = modeWith(Rules::Global, Strategy::CBV, Calculus::Extended);
  Term t = parseTerm("@a< (S k. k i) omega >", defs);

  auto s = step(t, ext);
  REQUIRE(s);
  CHECK(s->rule == "shift_ext");
  CHECK(alphaEq(s->term, parseTerm("< (\\p. @a< p omega >) i >", defs)));

  EvalOutcome out = evaluate(t, ext, 100);
  REQUIRE(std::holds_alternative<Normal>(out));
  const auto& n = std::get<Normal>(out);
  REQUIRE(std::holds_alternative<ContextStuckNF>(n.kind));
  CHECK(std::get<ContextStuckNF>(n.kind).cvar == "a");
  CHECK(alphaEq(n.term, parseTerm("< @a< omega > >", defs)));

  // the plain calculus rejects context applications outright
  CHECK_THROWS_AS(decompose(t, SemMode{}), IllegalInput);
}

TEST_CASE("mode validation") {
  CHECK_THROWS_AS(validateMode(modeWith(Rules::Local, Strategy::CBN)),
                  IllegalInput);
  CHECK_THROWS_AS(
      validateMode(modeWith(Rules::Local, Strategy::CBV, Calculus::Extended)),
      IllegalInput);
  CHECK_THROWS_AS(
      validateMode(modeWith(Rules::Global, Strategy::CBN, Calculus::Extended)),
      IllegalInput);
  CHECK_NOTHROW(validateMode(modeWith(Rules::Local)));
  CHECK_NOTHROW(validateMode(modeWith(Rules::Global, Strategy::CBN)));
}

TEST_CASE("original top level wraps the program in a delimiter once") {
  DefsTable defs = combinators();
  SemMode orig = modeWith(Rules::Global, Strategy::CBV, Calculus::Plain,
                          TopLevel::Original);

  EvalOutcome out = evaluate(parseTerm("S k. k i", defs), orig, 100);
  REQUIRE(std::holds_alternative<Normal>(out));
  CHECK(std::get<Normal>(out).steps == 4);
  CHECK(alphaEq(std::get<Normal>(out).term, parseTerm("i", defs)));

  // already delimited: no second wrapper
  EvalOutcome once = evaluate(parseTerm("< i >", defs), orig, 100);
  REQUIRE(std::holds_alternative<Normal>(once));
  CHECK(std::get<Normal>(once).steps == 1);
  CHECK(alphaEq(std::get<Normal>(once).term, parseTerm("i", defs)));
}

TEST_CASE("classify") {
  CHECK_FALSE(classify(parseTerm("< \\x. x >")).has_value());
  CHECK_FALSE(classify(parseTerm("(\\x. x) (\\y. y)")).has_value());

  auto v = classify(parseTerm("\\x. x"));
  REQUIRE(v);
  CHECK(kindName(*v) == "value");

  auto cs = classify(parseTerm("(S k. i) omega"));
  REQUIRE(cs);
  REQUIRE(std::holds_alternative<ControlStuckNF>(*cs));
  CHECK(std::get<ControlStuckNF>(*cs).ctx.frames.size() == 1);

  auto os = classify(parseTerm("< x (\\y. y) > ((\\x. x x) (\\x. x x))"));
  REQUIRE(os);
  CHECK(kindName(*os) == "open-stuck");

  // calculus is inferred from the term
  auto xs = classify(parseTerm("@a< \\x. x >"));
  REQUIRE(xs);
  CHECK(kindName(*xs) == "context-stuck");
}

// ---------------------------------------------------------------------------
// Independent spine-walk oracle for unique decomposition under global rules.

namespace {

enum class OTag { Value, Beta, ResetRedex, Capture, OpenStuck, ControlStuck, CtxStuck };

struct ORes {
  OTag tag;
  Term at;  // node where the focus lands
};

ORes owalk(const Term& t, bool cbn) {
  if (is<Var>(t) || is<Lam>(t)) return {OTag::Value, t};
  if (is<Shift>(t)) return {OTag::ControlStuck, t};
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    ORes f = owalk(n.fun, cbn);
    if (f.tag != OTag::Value) return f;
    if (!cbn) {
      ORes a = owalk(n.arg, cbn);
      if (a.tag != OTag::Value) return a;
    }
    if (is<Lam>(n.fun)) return {OTag::Beta, t};
    return {OTag::OpenStuck, t};
  }
  if (is<Reset>(t)) {
    ORes b = owalk(as<Reset>(t).body, cbn);
    if (b.tag == OTag::Value) return {OTag::ResetRedex, t};
    if (b.tag == OTag::ControlStuck) return {OTag::Capture, t};
    return b;
  }
  const auto& n = as<CtxApp>(t);
  ORes b = owalk(n.body, cbn);
  if (b.tag == OTag::Value) return {OTag::CtxStuck, t};
  if (b.tag == OTag::ControlStuck) return {OTag::Capture, t};
  return b;
}

void checkDecomposition(const Term& t, const SemMode& mode) {
  ORes o = owalk(t, mode.strategy == Strategy::CBN);
  Decomposition d = decompose(t, mode);

  if (std::holds_alternative<NFKind>(d)) {
    CHECK_FALSE(step(t, mode).has_value());
    const NFKind& k = std::get<NFKind>(d);
    if (std::holds_alternative<ValueNF>(k)) {
      CHECK(o.tag == OTag::Value);
      CHECK(isValue(t));
    } else if (std::holds_alternative<ControlStuckNF>(k)) {
      CHECK(o.tag == OTag::ControlStuck);
      const auto& s = std::get<ControlStuckNF>(k);
      CHECK(isPureCtx(s.ctx));
      CHECK(printTerm(plug(s.ctx, mkShift(s.k, s.body))) == printTerm(t));
    } else if (std::holds_alternative<OpenStuckNF>(k)) {
      CHECK(o.tag == OTag::OpenStuck);
      const auto& s = std::get<OpenStuckNF>(k);
      if (mode.strategy == Strategy::CBV) CHECK(isValue(s.arg));
      Term app = mkApp(mkVar(s.head), s.arg);
      CHECK(printTerm(plug(s.ctx, app)) == printTerm(t));
      CHECK(printTerm(app) == printTerm(o.at));
    } else {
      CHECK(o.tag == OTag::CtxStuck);
      const auto& s = std::get<ContextStuckNF>(k);
      CHECK(isValue(s.value));
      CHECK(printTerm(plug(s.ctx, mkCtxApp(s.cvar, s.value))) == printTerm(t));
    }
    return;
  }

  const auto& r = std::get<RedexInfo>(d);
  CHECK(printTerm(plug(r.context, r.redex)) == printTerm(t));
  for (const Frame& f : r.context.frames)
    if (std::holds_alternative<AppR>(f))
      CHECK(isValue(std::get<AppR>(f).fun));
  if (r.rule == "beta_v" || r.rule == "beta_n") {
    CHECK(o.tag == OTag::Beta);
    CHECK(r.redex.get() == o.at.get());
    CHECK((r.rule == "beta_n") == (mode.strategy == Strategy::CBN));
  } else if (r.rule == "reset") {
    CHECK(o.tag == OTag::ResetRedex);
    CHECK(r.redex.get() == o.at.get());
  } else if (r.rule == "shift" || r.rule == "shift_ext") {
    CHECK(o.tag == OTag::Capture);
    CHECK(printTerm(r.redex) == printTerm(o.at));
    REQUIRE(r.capture.has_value());
    CHECK(isPureCtx(r.capture->pureE));
    CHECK(isDelimiterFrame(r.capture->delim));
    CHECK((r.rule == "shift_ext") ==
          std::holds_alternative<CtxVarF>(r.capture->delim));
  } else {
    CHECK(false);  // local rule name under global mode
  }
}

}  // namespace

TEST_CASE("decompose agrees with an independent spine walk") {
  Gen g(811);
  GenOptions opt;
  for (int iter = 0; iter < 1000; ++iter) {
    Term t = testgen::genTerm(g, opt);
    checkDecomposition(t, modeWith());
    checkDecomposition(t, modeWith(Rules::Global, Strategy::CBN));
    // exercise the extended calculus by delimiting with a context variable
    Term e = g.chance(0.5) ? mkCtxApp("a", t) : mkReset(mkCtxApp("a", t));
    checkDecomposition(
        e, modeWith(Rules::Global, Strategy::CBV, Calculus::Extended));
  }
}

TEST_CASE("local rules: control-stuck means a bare shift") {
  Gen g(812);
  SemMode local = modeWith(Rules::Local);
  for (int iter = 0; iter < 1000; ++iter) {
    Term t = testgen::genTerm(g);
    Decomposition d = decompose(t, local);
    if (std::holds_alternative<NFKind>(d)) {
      const NFKind& k = std::get<NFKind>(d);
      if (std::holds_alternative<ControlStuckNF>(k)) {
        CHECK(is<Shift>(t));
        CHECK(std::get<ControlStuckNF>(k).ctx.frames.empty());
      }
    } else {
      // a step must reassemble to the same term
      const auto& r = std::get<RedexInfo>(d);
      CHECK(printTerm(plug(r.context, r.redex)) == printTerm(t));
    }
  }
}

TEST_CASE("a delimited program never finishes control-stuck") {
  Gen g(813);
  SemMode global = modeWith();
  SemMode local = modeWith(Rules::Local);
  for (int iter = 0; iter < 1000; ++iter) {
    Term t = mkReset(testgen::genTerm(g));
    for (const SemMode& m : {global, local}) {
      EvalOutcome out = evaluate(t, m, 300);
      if (std::holds_alternative<Normal>(out))
        CHECK(kindName(std::get<Normal>(out).kind) != "control-stuck");
    }
  }
}

TEST_CASE("plain terms behave identically in the extended calculus") {
  Gen g(814);
  SemMode plain = modeWith();
  SemMode ext = modeWith(Rules::Global, Strategy::CBV, Calculus::Extended);
  for (int iter = 0; iter < 600; ++iter) {
    Term t = testgen::genTerm(g);
    EvalOutcome a = evaluate(t, plain, 300);
    EvalOutcome b = evaluate(t, ext, 300);
    REQUIRE(a.index() == b.index());
    if (std::holds_alternative<Normal>(a)) {
      CHECK(std::get<Normal>(a).steps == std::get<Normal>(b).steps);
      CHECK(printTerm(std::get<Normal>(a).term) ==
            printTerm(std::get<Normal>(b).term));
      CHECK(kindName(std::get<Normal>(a).kind) ==
            kindName(std::get<Normal>(b).kind));
    } else if (std::holds_alternative<Diverges>(a)) {
      CHECK(std::get<Diverges>(a).steps == std::get<Diverges>(b).steps);
    }
  }
}

TEST_CASE("global and local rules agree on outcomes") {
  Gen g(815);
  SemMode global = modeWith();
  SemMode local = modeWith(Rules::Local);
  GenOptions opt;
  opt.freeVars = false;
  int nfChecked = 0;
  for (int iter = 0; iter < 600; ++iter) {
    Term t = testgen::genTerm(g, opt);
    EvalOutcome a = evaluate(t, global, 300);
    EvalOutcome b = evaluate(t, local, 1200);
    if (std::holds_alternative<FuelExhausted>(a) ||
        std::holds_alternative<FuelExhausted>(b))
      continue;
    bool aDiv = std::holds_alternative<Diverges>(a);
    bool bDiv = std::holds_alternative<Diverges>(b);
    CHECK(aDiv == bDiv);
    if (aDiv || bDiv) continue;
    const auto& na = std::get<Normal>(a);
    const auto& nb = std::get<Normal>(b);
    CHECK(kindName(na.kind) == kindName(nb.kind));
    // value results may differ in how they spell the captured
    // continuation; they stay bisimilar
    if (nfChecked < 50 && kindName(na.kind) == "value" &&
        kindName(nb.kind) == "value") {
      ++nfChecked;
      NfBudget small;
      small.depth = 8;
      NfVerdict v = nfBisimCheck(na.term, nb.term, Flavor::Plain, small);
      CHECK_FALSE(std::holds_alternative<NfInequivalent>(v));
    }
  }
  CHECK(nfChecked > 0);
}

TEST_CASE("ctxSplit cuts at the innermost delimiter") {
  Gen g(816);
  for (int iter = 0; iter < 500; ++iter) {
    EvalCtx ctx;
    int n = int(g.pick(7));
    for (int j = 0; j < n; ++j) {
      switch (g.pick(4)) {
        case 0: ctx.frames.push_back(AppL{testgen::genClosedTerm(g, 2)}); break;
        case 1: ctx.frames.push_back(AppR{testgen::genValue(g)}); break;
        case 2: ctx.frames.push_back(ResetF{}); break;
        default: ctx.frames.push_back(CtxVarF{"a"}); break;
      }
    }
    CtxSplit s = ctxSplit(ctx);
    Term z = mkVar("z");
    if (std::holds_alternative<PureOnly>(s)) {
      CHECK(isPureCtx(ctx));
      CHECK(printTerm(plug(std::get<PureOnly>(s).ctx, z)) ==
            printTerm(plug(ctx, z)));
    } else {
      const auto& sp = std::get<SplitCtx>(s);
      REQUIRE_FALSE(sp.inner.frames.empty());
      CHECK(isDelimiterFrame(sp.inner.frames.back()));
      for (std::size_t j = 0; j + 1 < sp.inner.frames.size(); ++j)
        CHECK_FALSE(isDelimiterFrame(sp.inner.frames[j]));
      CHECK(sp.inner.frames.size() + sp.outer.frames.size() ==
            ctx.frames.size());
      CHECK(printTerm(plug(sp.outer, plug(sp.inner, z))) ==
            printTerm(plug(ctx, z)));
    }
  }
}

TEST_CASE("evaluate agrees with stepping from the root") {
  Gen g(817);
  std::vector<SemMode> modes = {
      modeWith(),
      modeWith(Rules::Local),
      modeWith(Rules::Global, Strategy::CBN),
      modeWith(Rules::Global, Strategy::CBV, Calculus::Plain,
               TopLevel::Original),
      modeWith(Rules::Global, Strategy::CBV, Calculus::Extended),
  };
  const long fuel = 60;
  for (int iter = 0; iter < 1200; ++iter) {
    Term t = testgen::genTerm(g);
    const SemMode& mode = modes[iter % modes.size()];
    if (mode.calculus == Calculus::Extended && iter % 2 == 0)
      t = mkCtxApp("a0", t);

    // reference: the term sequence produced by stepping from the root
    Term start = t;
    if (mode.topLevel == TopLevel::Original && !is<Reset>(start))
      start = mkReset(start);
    std::vector<Term> seq{start};
    while (static_cast<long>(seq.size()) <= fuel) {
      auto s = step(seq.back(), mode);
      if (!s) break;
      seq.push_back(s->term);
    }

    EvalOutcome out = evaluate(t, mode, fuel);
    if (std::holds_alternative<Normal>(out)) {
      const auto& n = std::get<Normal>(out);
      REQUIRE(n.steps < static_cast<long>(seq.size()));
      CHECK(printTerm(n.term) == printTerm(seq[n.steps]));
      CHECK(n.steps + 1 == static_cast<long>(seq.size()));
      Decomposition d = decompose(seq[n.steps], mode);
      REQUIRE(std::holds_alternative<NFKind>(d));
      CHECK(kindName(n.kind) == kindName(std::get<NFKind>(d)));
    } else if (std::holds_alternative<Diverges>(out)) {
      const auto& d = std::get<Diverges>(out);
      REQUIRE(d.steps < static_cast<long>(seq.size()));
      CHECK(printTerm(d.loopWitness) == printTerm(seq[d.steps]));
      bool revisit = false;
      for (long j = 0; j < d.steps && !revisit; ++j)
        revisit = termKey(seq[j]) == termKey(seq[d.steps]);
      CHECK(revisit);
    } else {
      const auto& f = std::get<FuelExhausted>(out);
      REQUIRE(f.steps < static_cast<long>(seq.size()));
      CHECK(printTerm(f.last) == printTerm(seq[f.steps]));
    }
  }
}
