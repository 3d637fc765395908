#include "lamshift/app_bisim.hpp"

#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lamshift/parse.hpp"

namespace lamshift {

Pool defaultPool() {
  Pool p;
  const char* values[] = {
      "\\x. x",
      "\\x. x x",
      "\\x. (\\y. y y) (\\y. y y)",
      "\\x. S k. (\\y. y y) (\\y. y y)",
      "\\x. < x (\\y. y) >",
  };
  for (const char* s : values) p.values.push_back(parseTerm(s));
  const char* contexts[] = {
      "_",
      "_ (\\x. x)",
      "_ ((\\x. x x) (\\x. x x))",
      "(\\x. (\\y. y y) (\\y. y y)) _",
      "(\\x. x) _",
  };
  for (const char* s : contexts) p.contexts.push_back(parseContext(s));
  return p;
}

std::string labelName(const Label& l) {
  if (std::holds_alternative<TauL>(l)) return "tau";
  if (std::holds_alternative<ArgL>(l))
    return "arg " + printTerm(std::get<ArgL>(l).value);
  return "ctx " + printCtx(std::get<CtxL>(l).ctx);
}

std::optional<Term> ltsStep(const Term& t, const Label& l) {
  SemMode mode;  // plain CBV, global rules
  if (std::holds_alternative<TauL>(l)) {
    auto s = step(t, mode);
    if (!s) return std::nullopt;
    return s->term;
  }
  if (std::holds_alternative<ArgL>(l)) {
    if (!is<Lam>(t)) return std::nullopt;
    const auto& lam = as<Lam>(t);
    return substValue(lam.body, lam.binder, std::get<ArgL>(l).value);
  }
  auto k = classify(t);
  if (!k || !std::holds_alternative<ControlStuckNF>(*k)) return std::nullopt;
  const auto& stuck = std::get<ControlStuckNF>(*k);
  // < E[ E'[ S k. s ] ] >  steps by capturing the composed context.
  EvalCtx whole = composeCtx(std::get<CtxL>(l).ctx, stuck.ctx);
  VarSets avoid = freeVars(stuck.body);
  VarSets cv = freeVarsCtx(whole);
  avoid.vars.insert(cv.vars.begin(), cv.vars.end());
  VarId x = freshVar(avoid.vars, "x");
  Term cont = mkLam(x, mkReset(plug(whole, mkVar(x))));
  return mkReset(substValue(stuck.body, stuck.k, cont));
}

const char* observationName(Observation o) {
  switch (o) {
    case Observation::Value: return "value";
    case Observation::Stuck: return "stuck";
    case Observation::Diverge: return "diverge";
    case Observation::Unknown: return "unknown";
  }
  return "?";
}

namespace {

struct Observed {
  Observation obs;
  Term nf;  // meaningful for Value and Stuck
};

Observed observe(const Term& t, long fuel) {
  SemMode mode;
  EvalOutcome out = evaluate(t, mode, fuel);
  if (std::holds_alternative<Diverges>(out))
    return {Observation::Diverge, t};
  if (std::holds_alternative<FuelExhausted>(out))
    return {Observation::Unknown, t};
  const Normal& n = std::get<Normal>(out);
  if (std::holds_alternative<ValueNF>(n.kind)) return {Observation::Value, n.term};
  if (std::holds_alternative<ControlStuckNF>(n.kind))
    return {Observation::Stuck, n.term};
  throw std::logic_error("closed game reached an open normal form");
}

}  // namespace

Observation enabledObservation(const Term& t, long fuel) {
  return observe(t, fuel).obs;
}

namespace {

struct GameRec {
  Label label;
  Term left;
  Term right;
  int parent;
  long depth;
};

std::vector<AppMove> traceFrom(const std::vector<GameRec>& arena, int i) {
  std::vector<AppMove> out;
  for (int j = i; j >= 0; j = arena[j].parent)
    out.push_back(AppMove{arena[j].label, arena[j].left, arena[j].right});
  std::reverse(out.begin(), out.end());
  return out;
}

void requireClosedPlain(const Term& t) {
  if (!isPlain(t))
    throw IllegalInput("applicative game requires plain terms");
  VarSets fv = freeVars(t);
  if (!fv.vars.empty())
    throw IllegalInput("applicative game requires closed terms; free: " +
                       *fv.vars.begin());
}

}  // namespace

AppVerdict appBisimCheck(const Term& t0, const Term& t1, const Pool& pool,
                         AppBudget budget) {
  requireClosedPlain(t0);
  requireClosedPlain(t1);

  std::vector<GameRec> arena;
  std::deque<int> work;
  arena.push_back(GameRec{TauL{}, t0, t1, -1, 0});
  work.push_back(0);

  std::set<std::string> seen;
  long pairs = 0;
  bool bounded = false;
  bool sawUnknown = false;

  while (!work.empty()) {
    int idx = work.front();
    work.pop_front();
    GameRec rec = arena[idx];

    Observed oa = observe(rec.left, budget.fuel);
    Observed ob = observe(rec.right, budget.fuel);
    if (oa.obs == Observation::Unknown || ob.obs == Observation::Unknown) {
      // Fuel ran out on this branch; keep looking for a refutation on
      // the others before giving up.
      sawUnknown = true;
      continue;
    }
    if (oa.obs != ob.obs) {
      auto trace = traceFrom(arena, idx);
      return AppInequivalent{trace,
                             std::string("observations differ: ") +
                                 observationName(oa.obs) + " vs " +
                                 observationName(ob.obs),
                             {}};
    }
    if (oa.obs == Observation::Diverge) continue;

    std::string key = pairKey(oa.nf, ob.nf);
    if (!seen.insert(key).second) continue;
    if (rec.depth >= budget.depth) {
      bounded = true;
      continue;
    }
    ++pairs;

    if (oa.obs == Observation::Value) {
      for (const Term& v : pool.values) {
        Label l = ArgL{v};
        Term a = *ltsStep(oa.nf, l);
        Term b = *ltsStep(ob.nf, l);
        arena.push_back(GameRec{l, a, b, idx, rec.depth + 1});
        work.push_back(static_cast<int>(arena.size()) - 1);
      }
    } else {
      for (const EvalCtx& e : pool.contexts) {
        Label l = CtxL{e};
        Term a = *ltsStep(oa.nf, l);
        Term b = *ltsStep(ob.nf, l);
        arena.push_back(GameRec{l, a, b, idx, rec.depth + 1});
        work.push_back(static_cast<int>(arena.size()) - 1);
      }
    }
  }
  if (sawUnknown) return AppUnknown{"fuel exhausted on some branch"};
  return AppEquivalent{bounded, pairs};
}

AppVerdict appBisimCheckOpen(const Term& t0, const Term& t1, const Pool& pool,
                             AppBudget budget) {
  if (!isPlain(t0) || !isPlain(t1))
    throw IllegalInput("applicative game requires plain terms");
  VarSets f0 = freeVars(t0);
  VarSets f1 = freeVars(t1);
  std::set<VarId> free = f0.vars;
  free.insert(f1.vars.begin(), f1.vars.end());
  if (free.empty()) return appBisimCheck(t0, t1, pool, budget);

  std::vector<VarId> order(free.begin(), free.end());
  double combos = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    combos *= static_cast<double>(pool.values.size());
  if (combos > 4096)
    return AppUnknown{"too many closings for the pool"};

  std::vector<std::size_t> pick(order.size(), 0);
  bool anyBounded = false;
  bool anyUnknown = false;
  long pairs = 0;
  for (;;) {
    Term a = t0;
    Term b = t1;
    std::map<VarId, Term> closing;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Term& v = pool.values[pick[i]];
      closing[order[i]] = v;
      a = substValue(a, order[i], v);
      b = substValue(b, order[i], v);
    }
    AppVerdict verdict = appBisimCheck(a, b, pool, budget);
    if (std::holds_alternative<AppInequivalent>(verdict)) {
      auto ineq = std::get<AppInequivalent>(verdict);
      ineq.closing = closing;
      return ineq;
    }
    if (std::holds_alternative<AppUnknown>(verdict)) {
      anyUnknown = true;
    } else {
      anyBounded = anyBounded || std::get<AppEquivalent>(verdict).bounded;
      pairs += std::get<AppEquivalent>(verdict).pairs;
    }

    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == pool.values.size()) {
      pick[i] = 0;
      ++i;
    }
    if (i == pick.size()) break;
  }
  if (anyUnknown) return AppUnknown{"fuel exhausted on some closing"};
  return AppEquivalent{anyBounded, pairs};
}

EvalCtx synthesizeContext(const AppInequivalent& ineq) {
  EvalCtx ctx;
  for (std::size_t i = 1; i < ineq.trace.size(); ++i) {
    const Label& l = ineq.trace[i].label;
    if (std::holds_alternative<ArgL>(l)) {
      ctx.frames.push_back(AppL{std::get<ArgL>(l).value});
    } else if (std::holds_alternative<CtxL>(l)) {
      for (const Frame& f : std::get<CtxL>(l).ctx.frames)
        ctx.frames.push_back(f);
      ctx.frames.push_back(ResetF{});
    }
  }
  return ctx;
}

bool validateWitness(const Term& t0, const Term& t1,
                     const AppInequivalent& ineq, long fuel) {
  Term a = t0;
  Term b = t1;
  for (const auto& [x, v] : ineq.closing) {
    a = substValue(a, x, v);
    b = substValue(b, x, v);
  }
  EvalCtx ctx = synthesizeContext(ineq);
  Observation oa = enabledObservation(plug(ctx, a), fuel);
  Observation ob = enabledObservation(plug(ctx, b), fuel);
  return oa != ob && oa != Observation::Unknown && ob != Observation::Unknown;
}

std::string describeVerdict(const AppVerdict& v) {
  std::ostringstream os;
  if (std::holds_alternative<AppEquivalent>(v)) {
    const auto& eq = std::get<AppEquivalent>(v);
    os << "equivalent for this pool (" << eq.pairs << " pairs explored"
       << (eq.bounded ? ", cut by depth budget" : "") << ")";
  } else if (std::holds_alternative<AppInequivalent>(v)) {
    const auto& ineq = std::get<AppInequivalent>(v);
    os << "inequivalent: " << ineq.reason << "\n";
    if (!ineq.closing.empty()) {
      os << "  closing:";
      for (const auto& [x, t] : ineq.closing)
        os << " " << x << " := " << printTerm(t) << ";";
      os << "\n";
    }
    for (const auto& m : ineq.trace)
      os << "  [" << labelName(m.label) << "] " << printTerm(m.left)
         << "  vs  " << printTerm(m.right) << "\n";
  } else {
    os << "unknown: " << std::get<AppUnknown>(v).reason;
  }
  return os.str();
}

}  // namespace lamshift
