#include "lamshift/sem.hpp"

#include <set>

namespace lamshift {

namespace {
// Cap on unfolded term size: above it evaluation gives up with
// FuelExhausted rather than building runaway terms.
constexpr std::size_t kHardCap = std::size_t(1) << 20;
}  // namespace

void validateMode(const SemMode& mode) {
  if (mode.rules == Rules::Local &&
      (mode.calculus != Calculus::Plain || mode.strategy != Strategy::CBV))
    throw IllegalInput("local rules are defined on the plain CBV calculus");
  if (mode.strategy == Strategy::CBN &&
      (mode.calculus != Calculus::Plain || mode.rules != Rules::Global))
    throw IllegalInput("CBN supports only the plain calculus with global rules");
}

std::string kindName(const NFKind& k) {
  if (std::holds_alternative<ValueNF>(k)) return "value";
  if (std::holds_alternative<ControlStuckNF>(k)) return "control-stuck";
  if (std::holds_alternative<OpenStuckNF>(k)) return "open-stuck";
  return "context-stuck";
}

namespace {

// path holds the frames from the root down to cur, outermost first.
EvalCtx reversed(const std::vector<Frame>& path, std::size_t from, std::size_t to) {
  EvalCtx ctx;
  ctx.frames.reserve(to - from);
  for (std::size_t i = to; i > from; --i) ctx.frames.push_back(path[i - 1]);
  return ctx;
}

Decomposition decomposeShift(const Term& cur, std::vector<Frame>& path,
                             const SemMode& mode) {
  const auto& sh = as<Shift>(cur);
  if (mode.rules == Rules::Local) {
    if (path.empty())
      return NFKind{ControlStuckNF{EvalCtx{}, sh.binder, sh.body}};
    Frame back = path.back();
    EvalCtx context = reversed(path, 0, path.size() - 1);
    if (isDelimiterFrame(back)) {
      RedexInfo r{plugFrame(back, cur), context, "shift_empty",
                  CaptureInfo{EvalCtx{}, back, sh.binder, sh.body}};
      return r;
    }
    RedexInfo r{plugFrame(back, cur), context, "shift_elem",
                CaptureInfo{EvalCtx{}, back, sh.binder, sh.body}};
    return r;
  }
  // Global rules: capture up to the nearest enclosing delimiter.
  std::size_t j = path.size();
  while (j > 0 && !isDelimiterFrame(path[j - 1])) --j;
  if (j == 0)
    return NFKind{ControlStuckNF{reversed(path, 0, path.size()), sh.binder, sh.body}};
  Frame delim = path[j - 1];
  EvalCtx pureE = reversed(path, j, path.size());
  Term redex = plugFrame(delim, plug(pureE, cur));
  EvalCtx context = reversed(path, 0, j - 1);
  const char* rule =
      std::holds_alternative<ResetF>(delim) ? "shift" : "shift_ext";
  return RedexInfo{redex, context, rule, CaptureInfo{pureE, delim, sh.binder, sh.body}};
}

}  // namespace

Decomposition decompose(const Term& t, const SemMode& mode) {
  validateMode(mode);
  if (mode.calculus == Calculus::Plain && !isPlain(t))
    throw IllegalInput("plain calculus rejects context applications: " + printTerm(t));
  if (isValue(t)) return NFKind{ValueNF{t}};

  std::vector<Frame> path;  // outermost first
  Term cur = t;
  const bool cbn = mode.strategy == Strategy::CBN;
  for (;;) {
    if (is<App>(cur)) {
      const auto& n = as<App>(cur);
      if (!isValue(n.fun)) {
        path.push_back(AppL{n.arg});
        cur = n.fun;
        continue;
      }
      if (!cbn && !isValue(n.arg)) {
        path.push_back(AppR{n.fun});
        cur = n.arg;
        continue;
      }
      if (is<Lam>(n.fun))
        return RedexInfo{cur, reversed(path, 0, path.size()),
                         cbn ? "beta_n" : "beta_v", std::nullopt};
      return NFKind{OpenStuckNF{reversed(path, 0, path.size()),
                                as<Var>(n.fun).name, n.arg}};
    }
    if (is<Reset>(cur)) {
      const auto& n = as<Reset>(cur);
      if (isValue(n.body))
        return RedexInfo{cur, reversed(path, 0, path.size()), "reset", std::nullopt};
      path.push_back(ResetF{});
      cur = n.body;
      continue;
    }
    if (is<CtxApp>(cur)) {
      const auto& n = as<CtxApp>(cur);
      if (isValue(n.body))
        return NFKind{ContextStuckNF{reversed(path, 0, path.size()), n.cvar, n.body}};
      path.push_back(CtxVarF{n.cvar});
      cur = n.body;
      continue;
    }
    if (is<Shift>(cur)) return decomposeShift(cur, path, mode);
    // values never reach here: descent only enters non-values
    return NFKind{ValueNF{cur}};
  }
}

namespace {

std::set<VarId> varsAround(const CaptureInfo& c) {
  std::set<VarId> avoid = freeVarsCtx(c.pureE).vars;
  for (const auto& v : freeVars(c.body).vars) avoid.insert(v);
  avoid.insert(c.k);
  if (std::holds_alternative<AppL>(c.delim))
    for (const auto& v : freeVars(std::get<AppL>(c.delim).arg).vars) avoid.insert(v);
  if (std::holds_alternative<AppR>(c.delim))
    for (const auto& v : freeVars(std::get<AppR>(c.delim).fun).vars) avoid.insert(v);
  return avoid;
}

// <E[S k. body]>  ->  < body{ \x. <E[x]> / k } >
Term applyShiftPlain(const CaptureInfo& c) {
  VarId x = freshVar(varsAround(c));
  Term cont = mkLam(x, mkReset(plug(c.pureE, mkVar(x))));
  return mkReset(substValue(c.body, c.k, cont));
}

// F[D[S k. body]] -> F[< body{ \x. D[x] / k } >], D a delimited context
Term applyShiftExt(const CaptureInfo& c) {
  VarId x = freshVar(varsAround(c));
  Term cont = mkLam(x, plugFrame(c.delim, plug(c.pureE, mkVar(x))));
  return mkReset(substValue(c.body, c.k, cont));
}

// Ec[S k. body] -> S k'. body{ \x. <k' (Ec[x])> / k }
Term applyShiftElem(const CaptureInfo& c) {
  std::set<VarId> avoid = varsAround(c);
  VarId kp = freshVar(avoid, "k");
  avoid.insert(kp);
  VarId x = freshVar(avoid);
  Term cont = mkLam(x, mkReset(mkApp(mkVar(kp), plugFrame(c.delim, mkVar(x)))));
  return mkShift(kp, substValue(c.body, c.k, cont));
}

// <S k. body> -> < body{ \x. x / k } >
Term applyShiftEmpty(const CaptureInfo& c) {
  VarId x = freshVar({});
  return mkReset(substValue(c.body, c.k, mkLam(x, mkVar(x))));
}

Term applyRedex(const RedexInfo& r) {
  if (r.rule == "beta_v") {
    const auto& app = as<App>(r.redex);
    const auto& lam = as<Lam>(app.fun);
    return substValue(lam.body, lam.binder, app.arg);
  }
  if (r.rule == "beta_n") {
    const auto& app = as<App>(r.redex);
    const auto& lam = as<Lam>(app.fun);
    return substTerm(lam.body, lam.binder, app.arg);
  }
  if (r.rule == "reset") return as<Reset>(r.redex).body;
  const CaptureInfo& c = *r.capture;
  if (r.rule == "shift") return applyShiftPlain(c);
  if (r.rule == "shift_ext") return applyShiftExt(c);
  if (r.rule == "shift_elem") return applyShiftElem(c);
  return applyShiftEmpty(c);
}

// evaluate keeps the decomposition alive between steps instead of
// rebuilding it from the root, so a step costs work proportional to the
// contraction, not to the whole term. The redex is kept split to avoid
// materializing its node on the hot path.
enum class CaptKind { Shift, ShiftExt, ShiftElem, ShiftEmpty };

struct BetaAt { Term fun; Term arg; };  // fun is a lambda value
struct ResetAt { Term val; };           // redex is < val >
struct CaptureAt {
  CaptureInfo info;
  Term shiftNode;
  CaptKind kind;
};
using FoundRedex = std::variant<BetaAt, ResetAt, CaptureAt>;

Term holeTerm(const FoundRedex& r) {
  if (std::holds_alternative<BetaAt>(r))
    return mkApp(std::get<BetaAt>(r).fun, std::get<BetaAt>(r).arg);
  if (std::holds_alternative<ResetAt>(r))
    return mkReset(std::get<ResetAt>(r).val);
  const auto& c = std::get<CaptureAt>(r);
  return plugFrame(c.info.delim, plug(c.info.pureE, c.shiftNode));
}

std::size_t frameNodes(const Frame& f, std::size_t cap) {
  if (std::holds_alternative<AppL>(f))
    return 1 + termSize(std::get<AppL>(f).arg, cap);
  if (std::holds_alternative<AppR>(f))
    return 1 + termSize(std::get<AppR>(f).fun, cap);
  return 1;
}

std::size_t redexNodes(const FoundRedex& r, std::size_t cap) {
  if (std::holds_alternative<BetaAt>(r)) {
    const auto& b = std::get<BetaAt>(r);
    return 1 + termSize(b.fun, cap) + termSize(b.arg, cap);
  }
  if (std::holds_alternative<ResetAt>(r))
    return 1 + termSize(std::get<ResetAt>(r).val, cap);
  const auto& c = std::get<CaptureAt>(r);
  std::size_t n = termSize(c.shiftNode, cap) + frameNodes(c.info.delim, cap);
  for (const Frame& f : c.info.pureE.frames) n += frameNodes(f, cap);
  return n;
}

Term contractFound(const FoundRedex& r, bool cbn) {
  if (std::holds_alternative<BetaAt>(r)) {
    const auto& b = std::get<BetaAt>(r);
    const auto& lam = as<Lam>(b.fun);
    return cbn ? substTerm(lam.body, lam.binder, b.arg)
               : substValue(lam.body, lam.binder, b.arg);
  }
  if (std::holds_alternative<ResetAt>(r)) return std::get<ResetAt>(r).val;
  const auto& c = std::get<CaptureAt>(r);
  switch (c.kind) {
    case CaptKind::Shift: return applyShiftPlain(c.info);
    case CaptKind::ShiftExt: return applyShiftExt(c.info);
    case CaptKind::ShiftElem: return applyShiftElem(c.info);
    case CaptKind::ShiftEmpty: break;
  }
  return applyShiftEmpty(c.info);
}

// Advance (path, focus) to the next redex or to the normal form of the
// whole term. path is outermost first and its AppR frames always hold
// values. Branch for branch this mirrors decompose, so the redex chosen
// here is the one decompose would pick on the plugged term.
std::variant<NFKind, FoundRedex> refocus(std::vector<Frame>& path, Term& focus,
                                         const SemMode& mode) {
  const bool cbn = mode.strategy == Strategy::CBN;
  for (;;) {
    if (isValue(focus)) {
      if (path.empty()) return NFKind{ValueNF{focus}};
      Frame back = path.back();
      if (std::holds_alternative<AppL>(back)) {
        Term arg = std::get<AppL>(back).arg;
        if (!cbn && !isValue(arg)) {
          path.back() = AppR{focus};
          focus = arg;
          continue;
        }
        Term fun = focus;
        path.pop_back();
        if (is<Lam>(fun)) return FoundRedex{BetaAt{fun, arg}};
        focus = mkApp(fun, arg);
        return NFKind{OpenStuckNF{reversed(path, 0, path.size()),
                                  as<Var>(fun).name, arg}};
      }
      if (std::holds_alternative<AppR>(back)) {
        Term fun = std::get<AppR>(back).fun;
        Term arg = focus;
        path.pop_back();
        if (is<Lam>(fun)) return FoundRedex{BetaAt{fun, arg}};
        focus = mkApp(fun, arg);
        return NFKind{OpenStuckNF{reversed(path, 0, path.size()),
                                  as<Var>(fun).name, arg}};
      }
      if (std::holds_alternative<ResetF>(back)) {
        Term val = focus;
        path.pop_back();
        return FoundRedex{ResetAt{val}};
      }
      CtxVarId a = std::get<CtxVarF>(back).cvar;
      Term val = focus;
      path.pop_back();
      focus = mkCtxApp(a, val);
      return NFKind{ContextStuckNF{reversed(path, 0, path.size()), a, val}};
    }
    if (is<App>(focus)) {
      const auto& n = as<App>(focus);
      if (!isValue(n.fun)) {
        path.push_back(AppL{n.arg});
        focus = n.fun;
        continue;
      }
      if (!cbn && !isValue(n.arg)) {
        path.push_back(AppR{n.fun});
        focus = n.arg;
        continue;
      }
      if (is<Lam>(n.fun)) return FoundRedex{BetaAt{n.fun, n.arg}};
      return NFKind{OpenStuckNF{reversed(path, 0, path.size()),
                                as<Var>(n.fun).name, n.arg}};
    }
    if (is<Reset>(focus)) {
      const auto& n = as<Reset>(focus);
      if (isValue(n.body)) return FoundRedex{ResetAt{n.body}};
      path.push_back(ResetF{});
      focus = n.body;
      continue;
    }
    if (is<CtxApp>(focus)) {
      const auto& n = as<CtxApp>(focus);
      if (isValue(n.body))
        return NFKind{ContextStuckNF{reversed(path, 0, path.size()), n.cvar,
                                     n.body}};
      path.push_back(CtxVarF{n.cvar});
      focus = n.body;
      continue;
    }
    const auto& sh = as<Shift>(focus);
    if (mode.rules == Rules::Local) {
      if (path.empty())
        return NFKind{ControlStuckNF{EvalCtx{}, sh.binder, sh.body}};
      Frame back = path.back();
      CaptKind kind = isDelimiterFrame(back) ? CaptKind::ShiftEmpty
                                             : CaptKind::ShiftElem;
      FoundRedex r{CaptureAt{CaptureInfo{EvalCtx{}, back, sh.binder, sh.body},
                             focus, kind}};
      path.pop_back();
      return r;
    }
    std::size_t j = path.size();
    while (j > 0 && !isDelimiterFrame(path[j - 1])) --j;
    if (j == 0)
      return NFKind{ControlStuckNF{reversed(path, 0, path.size()), sh.binder,
                                   sh.body}};
    CaptKind kind = std::holds_alternative<ResetF>(path[j - 1])
                        ? CaptKind::Shift
                        : CaptKind::ShiftExt;
    FoundRedex r{CaptureAt{CaptureInfo{reversed(path, j, path.size()),
                                       path[j - 1], sh.binder, sh.body},
                           focus, kind}};
    path.resize(j - 1);
    return r;
  }
}

}  // namespace

std::optional<Stepped> step(const Term& t, const SemMode& mode) {
  Decomposition d = decompose(t, mode);
  if (std::holds_alternative<NFKind>(d)) return std::nullopt;
  const auto& r = std::get<RedexInfo>(d);
  return Stepped{plug(r.context, applyRedex(r)), r.rule};
}

EvalOutcome evaluate(const Term& t, const SemMode& mode, long fuel) {
  validateMode(mode);
  Term cur = t;
  if (mode.topLevel == TopLevel::Original && !is<Reset>(cur)) cur = mkReset(cur);
  if (mode.calculus == Calculus::Plain && !isPlain(cur))
    throw IllegalInput("plain calculus rejects context applications: " +
                       printTerm(cur));
  // Every rule preserves plainness, so the check above covers the run.
  const bool cbn = mode.strategy == Strategy::CBN;
  std::vector<Frame> path;
  Term focus = cur;
  std::size_t size = termSize(cur, kHardCap);
  long steps = 0;
  // Loop detection compares against a snapshot taken at power-of-two step
  // indices; any cycle is caught once the snapshot lands inside it and the
  // gap covers the period. The tracked size gates the alpha comparison, so
  // a growing run pays nothing for detection.
  Term snap;
  std::size_t snapSize = 0;
  bool haveSnap = false;
  long snapAt = 0;
  auto materialize = [&path](Term at) {
    for (std::size_t i = path.size(); i > 0; --i)
      at = plugFrame(path[i - 1], at);
    return at;
  };
  for (;;) {
    // size is exact while below the cap; crossing it ends the run, so
    // saturated measurements below never skew a comparison that matters.
    if (size >= kHardCap) return FuelExhausted{materialize(focus), steps};
    auto found = refocus(path, focus, mode);
    if (std::holds_alternative<NFKind>(found))
      return Normal{materialize(focus), std::get<NFKind>(found), steps};
    const FoundRedex& r = std::get<FoundRedex>(found);
    if (steps >= fuel) return FuelExhausted{materialize(holeTerm(r)), steps};
    if (haveSnap && size == snapSize) {
      Term whole = materialize(holeTerm(r));
      if (alphaEq(whole, snap)) return Diverges{whole, steps};
    }
    if (steps == snapAt) {
      snap = materialize(holeTerm(r));
      snapSize = size;
      haveSnap = true;
      snapAt = steps == 0 ? 1 : steps * 2;
    }
    if (std::holds_alternative<ResetAt>(r)) {
      focus = std::get<ResetAt>(r).val;
      size -= 1;
    } else {
      size -= redexNodes(r, kHardCap);
      focus = contractFound(r, cbn);
      size += termSize(focus, kHardCap);
    }
    ++steps;
  }
}

std::optional<NFKind> classify(const Term& t) {
  SemMode mode;
  mode.calculus = isPlain(t) ? Calculus::Plain : Calculus::Extended;
  Decomposition d = decompose(t, mode);
  if (std::holds_alternative<NFKind>(d)) return std::get<NFKind>(d);
  return std::nullopt;
}

CtxSplit ctxSplit(const EvalCtx& ctx) {
  for (std::size_t i = 0; i < ctx.frames.size(); ++i) {
    if (isDelimiterFrame(ctx.frames[i])) {
      SplitCtx s;
      s.inner.frames.assign(ctx.frames.begin(), ctx.frames.begin() + i + 1);
      s.outer.frames.assign(ctx.frames.begin() + i + 1, ctx.frames.end());
      return s;
    }
  }
  return PureOnly{ctx};
}

}  // namespace lamshift
