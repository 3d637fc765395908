#include "lamshift/nf_bisim.hpp"

#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lamshift {

const char* flavorName(Flavor f) {
  switch (f) {
    case Flavor::Plain: return "plain";
    case Flavor::Refined: return "refined";
    case Flavor::Pure: return "pure";
  }
  return "?";
}

namespace {

SemMode modeFor(Flavor f) {
  SemMode m;
  m.calculus = f == Flavor::Plain ? Calculus::Plain : Calculus::Extended;
  return m;
}

VarSets unionSets(std::initializer_list<const Term*> ts) {
  VarSets out;
  for (const Term* t : ts) {
    VarSets s = freeVars(*t);
    out.vars.insert(s.vars.begin(), s.vars.end());
    out.ctxVars.insert(s.ctxVars.begin(), s.ctxVars.end());
  }
  return out;
}

void addCtxVars(VarSets& out, const EvalCtx& e) {
  VarSets s = freeVarsCtx(e);
  out.vars.insert(s.vars.begin(), s.vars.end());
  out.ctxVars.insert(s.ctxVars.begin(), s.ctxVars.end());
}

// v0 z R v1 z, wrapped as @b< _ > in the pure game.
Obligation valueTest(const Term& v0, const Term& v1, Flavor flavor,
                     Polarity pol, const std::string& via) {
  VarSets avoid = unionSets({&v0, &v1});
  VarId z = freshVar(avoid.vars, "z");
  Term l = mkApp(v0, mkVar(z));
  Term r = mkApp(v1, mkVar(z));
  if (flavor == Flavor::Pure) {
    CtxVarId b = freshCtxVar(avoid.ctxVars);
    l = mkCtxApp(b, l);
    r = mkCtxApp(b, r);
  }
  return Obligation{l, r, pol, via};
}

// Context comparison: split each context at its innermost delimiter.
// Both pure: compare E0[z] with E1[z]. Both split: compare the inner
// delimited parts and the outer parts separately. Mixed shapes differ
// observably (plug a control effect).
Expansion nfcCompare(const EvalCtx& f0, const EvalCtx& f1, Flavor flavor) {
  CtxSplit s0 = ctxSplit(f0);
  CtxSplit s1 = ctxSplit(f1);
  VarSets avoid;
  addCtxVars(avoid, f0);
  addCtxVars(avoid, f1);
  std::vector<Obligation> obs;
  if (std::holds_alternative<PureOnly>(s0) &&
      std::holds_alternative<PureOnly>(s1)) {
    if (flavor == Flavor::Pure)
      throw std::logic_error("pure game compared undelimited contexts");
    VarId z = freshVar(avoid.vars, "z");
    obs.push_back(Obligation{plug(std::get<PureOnly>(s0).ctx, mkVar(z)),
                             plug(std::get<PureOnly>(s1).ctx, mkVar(z)),
                             Polarity::Active, "ctx-pure"});
    return obs;
  }
  if (std::holds_alternative<SplitCtx>(s0) &&
      std::holds_alternative<SplitCtx>(s1)) {
    const auto& d0 = std::get<SplitCtx>(s0);
    const auto& d1 = std::get<SplitCtx>(s1);
    VarId z = freshVar(avoid.vars, "z");
    obs.push_back(Obligation{plug(d0.inner, mkVar(z)), plug(d1.inner, mkVar(z)),
                             Polarity::Active, "ctx-inner"});
    obs.push_back(Obligation{plug(d0.outer, mkVar(z)), plug(d1.outer, mkVar(z)),
                             Polarity::Active, "ctx-outer"});
    return obs;
  }
  return NfMismatch{"context shapes differ: one delimited, one pure"};
}

}  // namespace

Expansion expandPair(const Term& nf0, const Term& nf1, Flavor flavor) {
  auto k0 = classify(nf0);
  auto k1 = classify(nf1);
  if (!k0 || !k1) throw std::logic_error("expandPair: not a normal form");
  if (k0->index() != k1->index())
    return NfMismatch{std::string("normal forms differ: ") + kindName(*k0) +
                      " vs " + kindName(*k1)};

  if (std::holds_alternative<ValueNF>(*k0)) {
    std::vector<Obligation> obs;
    obs.push_back(valueTest(std::get<ValueNF>(*k0).v, std::get<ValueNF>(*k1).v,
                            flavor, Polarity::Passive, "value"));
    return obs;
  }

  if (std::holds_alternative<ControlStuckNF>(*k0)) {
    const auto& c0 = std::get<ControlStuckNF>(*k0);
    const auto& c1 = std::get<ControlStuckNF>(*k1);
    if (flavor == Flavor::Pure)
      throw std::logic_error("pure game reached a control-stuck state");
    VarSets avoid = unionSets({&c0.body, &c1.body});
    addCtxVars(avoid, c0.ctx);
    addCtxVars(avoid, c1.ctx);
    std::vector<Obligation> obs;
    if (flavor == Flavor::Plain) {
      // Compare captured contexts and bodies separately; the bodies
      // keep a shared free continuation variable.
      VarId z = freshVar(avoid.vars, "z");
      avoid.vars.insert(z);
      VarId k = freshVar(avoid.vars, "k");
      obs.push_back(Obligation{plug(c0.ctx, mkVar(z)), plug(c1.ctx, mkVar(z)),
                               Polarity::Active, "stuck-ctx"});
      obs.push_back(
          Obligation{mkReset(substValue(c0.body, c0.k, mkVar(k))),
                     mkReset(substValue(c1.body, c1.k, mkVar(k))),
                     Polarity::Active, "stuck-body"});
      return obs;
    }
    // Refined: capture each context into a shared fresh context
    // variable and compare the resumed bodies as one obligation.
    CtxVarId a = freshCtxVar(avoid.ctxVars);
    VarId x = freshVar(avoid.vars, "x");
    Term cont0 = mkLam(x, mkCtxApp(a, plug(c0.ctx, mkVar(x))));
    Term cont1 = mkLam(x, mkCtxApp(a, plug(c1.ctx, mkVar(x))));
    std::vector<Obligation> ob1;
    ob1.push_back(Obligation{mkReset(substValue(c0.body, c0.k, cont0)),
                             mkReset(substValue(c1.body, c1.k, cont1)),
                             Polarity::Active, "stuck-capture"});
    return ob1;
  }

  if (std::holds_alternative<OpenStuckNF>(*k0)) {
    const auto& o0 = std::get<OpenStuckNF>(*k0);
    const auto& o1 = std::get<OpenStuckNF>(*k1);
    if (o0.head != o1.head)
      return NfMismatch{"open-stuck heads differ: " + o0.head + " vs " +
                        o1.head};
    Expansion ctxPart = nfcCompare(o0.ctx, o1.ctx, flavor);
    if (std::holds_alternative<NfMismatch>(ctxPart)) return ctxPart;
    auto obs = std::get<std::vector<Obligation>>(std::move(ctxPart));
    obs.push_back(
        valueTest(o0.arg, o1.arg, flavor, Polarity::Active, "stuck-arg"));
    return obs;
  }

  const auto& x0 = std::get<ContextStuckNF>(*k0);
  const auto& x1 = std::get<ContextStuckNF>(*k1);
  if (x0.cvar != x1.cvar)
    return NfMismatch{"context variables differ: " + x0.cvar + " vs " +
                      x1.cvar};
  // The contexts are compared with the delimiter the context variable
  // stands under made explicit.
  EvalCtx g0 = x0.ctx;
  EvalCtx g1 = x1.ctx;
  g0.frames.insert(g0.frames.begin(), ResetF{});
  g1.frames.insert(g1.frames.begin(), ResetF{});
  Expansion ctxPart = nfcCompare(g0, g1, flavor);
  if (std::holds_alternative<NfMismatch>(ctxPart)) return ctxPart;
  auto obs = std::get<std::vector<Obligation>>(std::move(ctxPart));
  obs.push_back(
      valueTest(x0.value, x1.value, flavor, Polarity::Passive, "ctxstuck-arg"));
  return obs;
}

namespace {

// Cancel a shared application frame between two normal forms, if any.
// Only applications qualify: stripping a shared delimiter would let the
// game refute through a pair whose top-level shape the delimiter was
// masking, and would unwrap the shared context variable the pure game
// relies on. Valid only on active obligations.
bool stripOne(Term& a, Term& b) {
  if (!is<App>(a) || !is<App>(b)) return false;
  const auto& pa = as<App>(a);
  const auto& pb = as<App>(b);
  if (isValue(pa.fun) && isValue(pb.fun) && alphaEq(pa.fun, pb.fun) &&
      !alphaEq(pa.arg, pb.arg)) {
    a = pa.arg;
    b = pb.arg;
    return true;
  }
  if (alphaEq(pa.arg, pb.arg) && !alphaEq(pa.fun, pb.fun)) {
    a = pa.fun;
    b = pb.fun;
    return true;
  }
  return false;
}

}  // namespace

UptoResult uptoNormalize(const Obligation& ob, const UpToOptions& upto,
                         const SemMode& mode, long fuel) {
  Term a = ob.left;
  Term b = ob.right;
  if (!upto.reductionDischarge && alphaEq(a, b))
    return {UptoResult::Status::Discharged, a, b};
  for (;;) {
    EvalOutcome ra = evaluate(a, mode, fuel);
    EvalOutcome rb = evaluate(b, mode, fuel);
    if (std::holds_alternative<FuelExhausted>(ra) ||
        std::holds_alternative<FuelExhausted>(rb))
      return {UptoResult::Status::Fuel, a, b};
    bool da = std::holds_alternative<Diverges>(ra);
    bool db = std::holds_alternative<Diverges>(rb);
    if (da && db) return {UptoResult::Status::Discharged, a, b};
    if (da != db) return {UptoResult::Status::OutcomeMismatch, a, b};
    Term na = std::get<Normal>(ra).term;
    Term nb = std::get<Normal>(rb).term;
    if (upto.reductionDischarge && alphaEq(na, nb))
      return {UptoResult::Status::Discharged, na, nb};
    if (ob.polarity == Polarity::Active && upto.contextStripping &&
        stripOne(na, nb)) {
      a = na;
      b = nb;
      continue;  // stripped parts are re-evaluated
    }
    return {UptoResult::Status::Pair, na, nb};
  }
}

namespace {

struct TraceRec {
  Term left;
  Term right;
  Polarity polarity;
  std::string via;
  int parent;
  long depth;
};

std::vector<NfTraceMove> traceFrom(const std::vector<TraceRec>& arena, int i) {
  std::vector<NfTraceMove> out;
  for (int j = i; j >= 0; j = arena[j].parent)
    out.push_back(NfTraceMove{arena[j].left, arena[j].right, arena[j].via});
  std::reverse(out.begin(), out.end());
  return out;
}

void requirePure(const Obligation& ob) {
  if (!isPure(ob.left) || !isPure(ob.right))
    throw std::logic_error("pure game generated an impure obligation via " +
                           ob.via);
}

}  // namespace

NfVerdict nfBisimCheck(const Term& t0, const Term& t1, Flavor flavor,
                       NfBudget budget, UpToOptions upto) {
  if (flavor == Flavor::Plain && (!isPlain(t0) || !isPlain(t1)))
    throw IllegalInput(
        "plain game requires terms without context variables or context "
        "applications");
  SemMode mode = modeFor(flavor);
  Term l = t0;
  Term r = t1;
  if (flavor == Flavor::Pure && !(isPure(l) && isPure(r))) {
    VarSets avoid = freeVars(l);
    VarSets sr = freeVars(r);
    avoid.ctxVars.insert(sr.ctxVars.begin(), sr.ctxVars.end());
    CtxVarId a = freshCtxVar(avoid.ctxVars);
    l = mkCtxApp(a, l);
    r = mkCtxApp(a, r);
  }

  std::vector<TraceRec> arena;
  std::deque<int> work;
  arena.push_back(TraceRec{l, r, Polarity::Active, "root", -1, 0});
  work.push_back(0);

  std::map<std::string, int> visited;
  std::vector<WitnessPair> witness;

  while (!work.empty()) {
    int idx = work.front();
    work.pop_front();
    TraceRec rec = arena[idx];

    Obligation ob{rec.left, rec.right, rec.polarity, rec.via};
    UptoResult u = uptoNormalize(ob, upto, mode, budget.fuel);
    switch (u.status) {
      case UptoResult::Status::Fuel:
        return NfUnknown{"fuel exhausted"};
      case UptoResult::Status::OutcomeMismatch: {
        auto trace = traceFrom(arena, idx);
        return NfInequivalent{trace, "one side diverges, the other reaches a "
                                     "normal form"};
      }
      case UptoResult::Status::Discharged:
        if (rec.parent == -1 && witness.empty())
          witness.push_back(WitnessPair{u.left, u.right, rec.via});
        continue;
      case UptoResult::Status::Pair:
        break;
    }

    std::string key = pairKey(u.left, u.right);
    auto hit = visited.find(key);
    if (hit != visited.end()) continue;  // coinductive discharge

    if (rec.depth >= budget.depth) return NfUnknown{"depth exhausted"};

    visited[key] = static_cast<int>(witness.size());
    witness.push_back(WitnessPair{u.left, u.right, rec.via});

    Expansion exp = expandPair(u.left, u.right, flavor);
    if (std::holds_alternative<NfMismatch>(exp)) {
      auto trace = traceFrom(arena, idx);
      return NfInequivalent{trace, std::get<NfMismatch>(exp).reason};
    }
    for (const Obligation& next : std::get<std::vector<Obligation>>(exp)) {
      if (flavor == Flavor::Pure) requirePure(next);
      arena.push_back(TraceRec{next.left, next.right, next.polarity, next.via,
                               idx, rec.depth + 1});
      work.push_back(static_cast<int>(arena.size()) - 1);
    }
  }
  return NfEquivalent{witness};
}

std::string witnessRelation(const NfVerdict& v) {
  std::ostringstream os;
  if (std::holds_alternative<NfEquivalent>(v)) {
    const auto& w = std::get<NfEquivalent>(v).witness;
    os << "equivalent; bisimulation candidate with " << w.size() << " pair"
       << (w.size() == 1 ? "" : "s") << "\n";
    for (const auto& p : w)
      os << "  [" << p.via << "] " << printTerm(p.left) << "  ~  "
         << printTerm(p.right) << "\n";
  } else if (std::holds_alternative<NfInequivalent>(v)) {
    const auto& ineq = std::get<NfInequivalent>(v);
    os << "inequivalent: " << ineq.reason << "\n";
    for (const auto& m : ineq.trace)
      os << "  [" << m.via << "] " << printTerm(m.left) << "  vs  "
         << printTerm(m.right) << "\n";
  } else {
    os << "unknown: " << std::get<NfUnknown>(v).reason << "\n";
  }
  return os.str();
}

}  // namespace lamshift
