#include "lamshift/cps.hpp"

#include <set>

namespace lamshift {

namespace {

constexpr std::size_t kKeyCap = std::size_t(1) << 16;
constexpr std::size_t kHardCap = std::size_t(1) << 20;

bool isLambdaOnly(const Term& t) {
  if (is<Var>(t)) return true;
  if (is<Lam>(t)) return isLambdaOnly(as<Lam>(t).body);
  if (is<App>(t)) return isLambdaOnly(as<App>(t).fun) && isLambdaOnly(as<App>(t).arg);
  return false;
}

void allNames(const Term& t, std::set<VarId>& out) {
  if (is<Var>(t)) { out.insert(as<Var>(t).name); return; }
  if (is<Lam>(t)) { out.insert(as<Lam>(t).binder); allNames(as<Lam>(t).body, out); return; }
  if (is<Shift>(t)) { out.insert(as<Shift>(t).binder); allNames(as<Shift>(t).body, out); return; }
  if (is<App>(t)) { allNames(as<App>(t).fun, out); allNames(as<App>(t).arg, out); return; }
  if (is<Reset>(t)) { allNames(as<Reset>(t).body, out); return; }
  allNames(as<CtxApp>(t).body, out);
}

// Deterministic supply of binder names disjoint from the source term.
struct NameSupply {
  std::set<VarId> used;
  VarId gen(const std::string& base) {
    VarId v = freshVar(used, base);
    used.insert(v);
    return v;
  }
};

Term initialK(NameSupply& names) {
  VarId x = names.gen("x");
  VarId k2 = names.gen("k");
  return mkLam(x, mkLam(k2, mkApp(mkVar(k2), mkVar(x))));
}

Term app2(Term f, Term a, Term b) { return mkApp(mkApp(std::move(f), std::move(a)), std::move(b)); }
Term app3(Term f, Term a, Term b, Term c) {
  return mkApp(app2(std::move(f), std::move(a), std::move(b)), std::move(c));
}

Term translate(const Term& t, NameSupply& names) {
  if (is<Var>(t)) {
    VarId k1 = names.gen("k"), k2 = names.gen("k");
    return mkLam(k1, mkLam(k2, app2(mkVar(k1), t, mkVar(k2))));
  }
  if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    VarId k1 = names.gen("k"), k2 = names.gen("k");
    Term inner = mkLam(n.binder, translate(n.body, names));
    return mkLam(k1, mkLam(k2, app2(mkVar(k1), inner, mkVar(k2))));
  }
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    VarId k1 = names.gen("k"), k2 = names.gen("k");
    VarId x0 = names.gen("x"), k2p = names.gen("k");
    VarId x1 = names.gen("x"), k2pp = names.gen("k");
    Term innermost = app3(mkVar(x0), mkVar(x1), mkVar(k1), mkVar(k2pp));
    Term argK = mkLam(x1, mkLam(k2pp, innermost));
    Term funK = mkLam(x0, mkLam(k2p, app2(translate(n.arg, names), argK, mkVar(k2p))));
    return mkLam(k1, mkLam(k2, app2(translate(n.fun, names), funK, mkVar(k2))));
  }
  if (is<Reset>(t)) {
    const auto& n = as<Reset>(t);
    VarId k1 = names.gen("k"), k2 = names.gen("k");
    VarId x = names.gen("x");
    Term outerK = mkLam(x, app2(mkVar(k1), mkVar(x), mkVar(k2)));
    return mkLam(k1, mkLam(k2, app2(translate(n.body, names), initialK(names), outerK)));
  }
  if (is<Shift>(t)) {
    const auto& n = as<Shift>(t);
    VarId k1 = names.gen("k"), k2 = names.gen("k");
    VarId x1 = names.gen("x"), k1p = names.gen("k"), k2p = names.gen("k");
    VarId x2 = names.gen("x");
    Term reified =
        mkLam(x1, mkLam(k1p, mkLam(k2p,
            app2(mkVar(k1), mkVar(x1),
                 mkLam(x2, app2(mkVar(k1p), mkVar(x2), mkVar(k2p)))))));
    Term body = substValue(translate(n.body, names), n.binder, reified);
    return mkLam(k1, mkLam(k2, app2(body, initialK(names), mkVar(k2))));
  }
  throw IllegalInput("cpsTranslate: extended terms are not translatable");
}

}  // namespace

Term cpsTranslate(const Term& t) {
  if (!isPlain(t)) throw IllegalInput("cpsTranslate: extended terms are not translatable");
  NameSupply names;
  allNames(t, names.used);
  return translate(t, names);
}

Term cpsInitialK() {
  NameSupply names;
  return initialK(names);
}

namespace {

std::optional<Term> betaStep(const Term& t) {
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    if (is<Lam>(n.fun)) {
      const auto& lam = as<Lam>(n.fun);
      return substTerm(lam.body, lam.binder, n.arg);
    }
    if (auto r = betaStep(n.fun)) return mkApp(*r, n.arg);
    if (auto r = betaStep(n.arg)) return mkApp(n.fun, *r);
    return std::nullopt;
  }
  if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    if (auto r = betaStep(n.body)) return mkLam(n.binder, *r);
    return std::nullopt;
  }
  return std::nullopt;
}

// Bottom-up eta sweep; counts contractions performed.
Term etaSweep(const Term& t, long& contracted) {
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    Term f = etaSweep(n.fun, contracted);
    Term a = etaSweep(n.arg, contracted);
    return (f == n.fun && a == n.arg) ? t : mkApp(f, a);
  }
  if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    Term b = etaSweep(n.body, contracted);
    if (is<App>(b)) {
      const auto& app = as<App>(b);
      if (is<Var>(app.arg) && as<Var>(app.arg).name == n.binder &&
          !freeVars(app.fun).vars.count(n.binder)) {
        ++contracted;
        return app.fun;
      }
    }
    return b == n.body ? t : mkLam(n.binder, b);
  }
  return t;
}

}  // namespace

NormResult betaEtaNormalize(const Term& t, long fuel) {
  if (!isLambdaOnly(t))
    throw IllegalInput("betaEtaNormalize expects a pure lambda term");
  Term cur = t;
  long steps = 0;
  std::set<std::string> visited;
  for (;;) {
    // beta phase
    for (;;) {
      std::size_t size = termSize(cur, kHardCap);
      if (size >= kHardCap) return NormFuel{cur, steps};
      auto next = betaStep(cur);
      if (!next) break;
      if (steps >= fuel) return NormFuel{cur, steps};
      if (size < kKeyCap && !visited.insert(termKey(cur)).second)
        return NormFuel{cur, steps};
      cur = *next;
      ++steps;
    }
    // eta phase; loop back to beta afterwards until both quiesce
    long contracted = 0;
    Term swept = etaSweep(cur, contracted);
    if (contracted == 0) return Normalized{cur, steps};
    steps += contracted;
    if (steps > fuel) return NormFuel{swept, steps};
    cur = swept;
  }
}

const char* cpsAnswerName(CpsAnswer a) {
  switch (a) {
    case CpsAnswer::Yes: return "yes";
    case CpsAnswer::No: return "no";
    default: return "unknown";
  }
}

CpsAnswer cpsEquiv(const Term& t0, const Term& t1, long fuel) {
  NormResult n0 = betaEtaNormalize(cpsTranslate(t0), fuel);
  NormResult n1 = betaEtaNormalize(cpsTranslate(t1), fuel);
  if (std::holds_alternative<NormFuel>(n0) || std::holds_alternative<NormFuel>(n1))
    return CpsAnswer::Unknown;
  return alphaEq(std::get<Normalized>(n0).term, std::get<Normalized>(n1).term)
             ? CpsAnswer::Yes
             : CpsAnswer::No;
}

EvalOutcome runCps(const Term& t, long fuel) {
  VarSets fv = freeVars(t);
  if (!fv.vars.empty() || !fv.ctxVars.empty())
    throw IllegalInput("runCps expects a closed term");
  Term image = cpsTranslate(t);
  NameSupply names;
  allNames(image, names.used);
  Term kinit = initialK(names);
  VarId x = names.gen("x");
  Term idK = mkLam(x, mkVar(x));
  SemMode mode;  // CBV, global, plain, relaxed
  return evaluate(mkApp(mkApp(image, kinit), idK), mode, fuel);
}

}  // namespace lamshift
