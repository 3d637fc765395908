#include "lamshift/term.hpp"

#include <map>
#include <sstream>
#include <unordered_map>

namespace lamshift {

Term mkVar(VarId name) { return std::make_shared<TermNode>(TermNode{Var{std::move(name)}}); }
Term mkLam(VarId binder, Term body) {
  return std::make_shared<TermNode>(TermNode{Lam{std::move(binder), std::move(body)}});
}
Term mkApp(Term fun, Term arg) {
  return std::make_shared<TermNode>(TermNode{App{std::move(fun), std::move(arg)}});
}
Term mkShift(VarId binder, Term body) {
  return std::make_shared<TermNode>(TermNode{Shift{std::move(binder), std::move(body)}});
}
Term mkReset(Term body) { return std::make_shared<TermNode>(TermNode{Reset{std::move(body)}}); }
Term mkCtxApp(CtxVarId cvar, Term body) {
  return std::make_shared<TermNode>(TermNode{CtxApp{std::move(cvar), std::move(body)}});
}

bool isValue(const Term& t) { return is<Var>(t) || is<Lam>(t); }

bool isPlain(const Term& t) {
  if (is<Var>(t)) return true;
  if (is<Lam>(t)) return isPlain(as<Lam>(t).body);
  if (is<App>(t)) return isPlain(as<App>(t).fun) && isPlain(as<App>(t).arg);
  if (is<Shift>(t)) return isPlain(as<Shift>(t).body);
  if (is<Reset>(t)) return isPlain(as<Reset>(t).body);
  return false;
}

bool isPure(const Term& t) { return isValue(t) || is<Reset>(t) || is<CtxApp>(t); }

static std::size_t sizeRec(const TermNode* n, std::size_t cap,
                           std::unordered_map<const TermNode*, std::size_t>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::size_t s = 1;
  auto add = [&](const Term& c) {
    if (s < cap) {
      std::size_t cs = sizeRec(c.get(), cap, memo);
      s = (cs >= cap - s) ? cap : s + cs;
    }
  };
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Lam> || std::is_same_v<T, Shift> ||
                      std::is_same_v<T, Reset> || std::is_same_v<T, CtxApp>) {
          add(node.body);
        } else if constexpr (std::is_same_v<T, App>) {
          add(node.fun);
          add(node.arg);
        }
      },
      n->v);
  memo.emplace(n, s);
  return s;
}

std::size_t termSize(const Term& t, std::size_t cap) {
  std::unordered_map<const TermNode*, std::size_t> memo;
  return sizeRec(t.get(), cap, memo);
}

static void fvRec(const Term& t, std::set<VarId>& bound, VarSets& out) {
  if (is<Var>(t)) {
    const auto& name = as<Var>(t).name;
    if (!bound.count(name)) out.vars.insert(name);
  } else if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    bool fresh = bound.insert(n.binder).second;
    fvRec(n.body, bound, out);
    if (fresh) bound.erase(n.binder);
  } else if (is<Shift>(t)) {
    const auto& n = as<Shift>(t);
    bool fresh = bound.insert(n.binder).second;
    fvRec(n.body, bound, out);
    if (fresh) bound.erase(n.binder);
  } else if (is<App>(t)) {
    fvRec(as<App>(t).fun, bound, out);
    fvRec(as<App>(t).arg, bound, out);
  } else if (is<Reset>(t)) {
    fvRec(as<Reset>(t).body, bound, out);
  } else {
    out.ctxVars.insert(as<CtxApp>(t).cvar);
    fvRec(as<CtxApp>(t).body, bound, out);
  }
}

VarSets freeVars(const Term& t) {
  VarSets out;
  std::set<VarId> bound;
  fvRec(t, bound, out);
  return out;
}

// Alpha-equivalence via synchronized binder numbering.
static bool aeqRec(const Term& a, const Term& b, int depth,
                   std::map<VarId, int>& la, std::map<VarId, int>& lb) {
  if (a->v.index() != b->v.index()) return false;
  if (is<Var>(a)) {
    const auto& x = as<Var>(a).name;
    const auto& y = as<Var>(b).name;
    auto ia = la.find(x), ib = lb.find(y);
    if (ia == la.end() && ib == lb.end()) return x == y;  // both free
    if (ia == la.end() || ib == lb.end()) return false;
    return ia->second == ib->second;
  }
  auto under = [&](const VarId& x, const VarId& y, const Term& ba, const Term& bb) {
    auto oldA = la.find(x) == la.end() ? -1 : la[x];
    auto oldB = lb.find(y) == lb.end() ? -1 : lb[y];
    la[x] = depth;
    lb[y] = depth;
    bool r = aeqRec(ba, bb, depth + 1, la, lb);
    if (oldA < 0) la.erase(x); else la[x] = oldA;
    if (oldB < 0) lb.erase(y); else lb[y] = oldB;
    return r;
  };
  if (is<Lam>(a))
    return under(as<Lam>(a).binder, as<Lam>(b).binder, as<Lam>(a).body, as<Lam>(b).body);
  if (is<Shift>(a))
    return under(as<Shift>(a).binder, as<Shift>(b).binder, as<Shift>(a).body, as<Shift>(b).body);
  if (is<App>(a))
    return aeqRec(as<App>(a).fun, as<App>(b).fun, depth, la, lb) &&
           aeqRec(as<App>(a).arg, as<App>(b).arg, depth, la, lb);
  if (is<Reset>(a)) return aeqRec(as<Reset>(a).body, as<Reset>(b).body, depth, la, lb);
  return as<CtxApp>(a).cvar == as<CtxApp>(b).cvar &&
         aeqRec(as<CtxApp>(a).body, as<CtxApp>(b).body, depth, la, lb);
}

bool alphaEq(const Term& a, const Term& b) {
  if (a == b) return true;
  std::map<VarId, int> la, lb;
  return aeqRec(a, b, 0, la, lb);
}

static Term substRec(const Term& t, const VarId& x, const Term& s,
                     const std::set<VarId>& fvS) {
  if (is<Var>(t)) return as<Var>(t).name == x ? s : t;
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    Term f = substRec(n.fun, x, s, fvS);
    Term a = substRec(n.arg, x, s, fvS);
    return (f == n.fun && a == n.arg) ? t : mkApp(f, a);
  }
  if (is<Reset>(t)) {
    const auto& n = as<Reset>(t);
    Term b = substRec(n.body, x, s, fvS);
    return b == n.body ? t : mkReset(b);
  }
  if (is<CtxApp>(t)) {
    const auto& n = as<CtxApp>(t);
    Term b = substRec(n.body, x, s, fvS);
    return b == n.body ? t : mkCtxApp(n.cvar, b);
  }
  // binders
  const bool isLam = is<Lam>(t);
  const VarId& binder = isLam ? as<Lam>(t).binder : as<Shift>(t).binder;
  const Term& body = isLam ? as<Lam>(t).body : as<Shift>(t).body;
  if (binder == x) return t;
  if (fvS.count(binder)) {
    // rename the binder away from the free variables of s
    std::set<VarId> avoid = fvS;
    for (const auto& v : freeVars(body).vars) avoid.insert(v);
    avoid.insert(x);
    VarId fresh = freshVar(avoid, binder);
    Term renamed = substRec(body, binder, mkVar(fresh), {fresh});
    Term nb = substRec(renamed, x, s, fvS);
    return isLam ? mkLam(fresh, nb) : mkShift(fresh, nb);
  }
  Term nb = substRec(body, x, s, fvS);
  if (nb == body) return t;
  return isLam ? mkLam(binder, nb) : mkShift(binder, nb);
}

Term substTerm(const Term& t, const VarId& x, const Term& s) {
  return substRec(t, x, s, freeVars(s).vars);
}

Term substValue(const Term& t, const VarId& x, const Term& v) {
  if (!isValue(v)) throw IllegalInput("substValue: replacement is not a value: " + printTerm(v));
  return substTerm(t, x, v);
}

static std::string numbered(const std::string& base, unsigned long n) {
  return base + std::to_string(n);
}

VarId freshVar(const std::set<VarId>& avoid, const std::string& base) {
  for (unsigned long n = 0;; ++n) {
    VarId cand = numbered(base, n);
    if (!avoid.count(cand)) return cand;
  }
}

CtxVarId freshCtxVar(const std::set<CtxVarId>& avoid, const std::string& base) {
  for (unsigned long n = 0;; ++n) {
    CtxVarId cand = numbered(base, n);
    if (!avoid.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------
// Contexts.

Term plugFrame(const Frame& f, Term t) {
  if (std::holds_alternative<AppL>(f)) return mkApp(std::move(t), std::get<AppL>(f).arg);
  if (std::holds_alternative<AppR>(f)) return mkApp(std::get<AppR>(f).fun, std::move(t));
  if (std::holds_alternative<ResetF>(f)) return mkReset(std::move(t));
  return mkCtxApp(std::get<CtxVarF>(f).cvar, std::move(t));
}

Term plug(const EvalCtx& ctx, Term t) {
  for (const auto& f : ctx.frames) t = plugFrame(f, t);
  return t;
}

bool isDelimiterFrame(const Frame& f) {
  return std::holds_alternative<ResetF>(f) || std::holds_alternative<CtxVarF>(f);
}

bool isPureCtx(const EvalCtx& ctx) {
  for (const auto& f : ctx.frames)
    if (isDelimiterFrame(f)) return false;
  return true;
}

VarSets freeVarsCtx(const EvalCtx& ctx) {
  VarSets out;
  for (const auto& f : ctx.frames) {
    if (std::holds_alternative<AppL>(f)) {
      VarSets s = freeVars(std::get<AppL>(f).arg);
      out.vars.insert(s.vars.begin(), s.vars.end());
      out.ctxVars.insert(s.ctxVars.begin(), s.ctxVars.end());
    } else if (std::holds_alternative<AppR>(f)) {
      VarSets s = freeVars(std::get<AppR>(f).fun);
      out.vars.insert(s.vars.begin(), s.vars.end());
      out.ctxVars.insert(s.ctxVars.begin(), s.ctxVars.end());
    } else if (std::holds_alternative<CtxVarF>(f)) {
      out.ctxVars.insert(std::get<CtxVarF>(f).cvar);
    }
  }
  return out;
}

EvalCtx composeCtx(const EvalCtx& outer, const EvalCtx& inner) {
  EvalCtx r;
  r.frames = inner.frames;
  r.frames.insert(r.frames.end(), outer.frames.begin(), outer.frames.end());
  return r;
}

static Term substCtxRec(const Term& t, const CtxVarId& a, const EvalCtx& d,
                        const std::set<VarId>& fvD);

static EvalCtx substCtxInCtx(const EvalCtx& c, const CtxVarId& a, const EvalCtx& d,
                             const std::set<VarId>& fvD) {
  EvalCtx r;
  r.frames.reserve(c.frames.size());
  for (const auto& f : c.frames) {
    if (std::holds_alternative<AppL>(f)) {
      r.frames.push_back(AppL{substCtxRec(std::get<AppL>(f).arg, a, d, fvD)});
    } else if (std::holds_alternative<AppR>(f)) {
      r.frames.push_back(AppR{substCtxRec(std::get<AppR>(f).fun, a, d, fvD)});
    } else if (std::holds_alternative<CtxVarF>(f) && std::get<CtxVarF>(f).cvar == a) {
      // @a< [] > becomes d[ [] ]: splice d's frames
      r.frames.insert(r.frames.end(), d.frames.begin(), d.frames.end());
    } else {
      r.frames.push_back(f);
    }
  }
  return r;
}

static Term substCtxRec(const Term& t, const CtxVarId& a, const EvalCtx& d,
                        const std::set<VarId>& fvD) {
  if (is<Var>(t)) return t;
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    Term f = substCtxRec(n.fun, a, d, fvD);
    Term g = substCtxRec(n.arg, a, d, fvD);
    return (f == n.fun && g == n.arg) ? t : mkApp(f, g);
  }
  if (is<Reset>(t)) {
    const auto& n = as<Reset>(t);
    Term b = substCtxRec(n.body, a, d, fvD);
    return b == n.body ? t : mkReset(b);
  }
  if (is<CtxApp>(t)) {
    const auto& n = as<CtxApp>(t);
    Term b = substCtxRec(n.body, a, d, fvD);
    if (n.cvar == a) return plug(d, b);
    return b == n.body ? t : mkCtxApp(n.cvar, b);
  }
  const bool isLam = is<Lam>(t);
  const VarId& binder = isLam ? as<Lam>(t).binder : as<Shift>(t).binder;
  const Term& body = isLam ? as<Lam>(t).body : as<Shift>(t).body;
  if (fvD.count(binder)) {
    std::set<VarId> avoid = fvD;
    for (const auto& v : freeVars(body).vars) avoid.insert(v);
    VarId fresh = freshVar(avoid, binder);
    Term renamed = substTerm(body, binder, mkVar(fresh));
    Term nb = substCtxRec(renamed, a, d, fvD);
    return isLam ? mkLam(fresh, nb) : mkShift(fresh, nb);
  }
  Term nb = substCtxRec(body, a, d, fvD);
  if (nb == body) return t;
  return isLam ? mkLam(binder, nb) : mkShift(binder, nb);
}

Term substCtx(const Term& t, const CtxVarId& a, const EvalCtx& d) {
  return substCtxRec(t, a, d, freeVarsCtx(d).vars);
}

// ---------------------------------------------------------------------------
// Printing. Application is left-associative and binds tighter than
// binders; binder bodies extend maximally to the right.

namespace {
enum class Pos { Tail, Fun, Arg };

void printRec(const Term& t, Pos pos, std::string& out) {
  if (is<Var>(t)) {
    out += as<Var>(t).name;
    return;
  }
  if (is<Reset>(t)) {
    out += '<';
    printRec(as<Reset>(t).body, Pos::Tail, out);
    out += '>';
    return;
  }
  if (is<CtxApp>(t)) {
    out += '@';
    out += as<CtxApp>(t).cvar;
    out += "< ";
    printRec(as<CtxApp>(t).body, Pos::Tail, out);
    out += " >";
    return;
  }
  if (is<App>(t)) {
    bool parens = pos == Pos::Arg;
    if (parens) out += '(';
    printRec(as<App>(t).fun, Pos::Fun, out);
    out += ' ';
    printRec(as<App>(t).arg, Pos::Arg, out);
    if (parens) out += ')';
    return;
  }
  bool parens = pos != Pos::Tail;
  if (parens) out += '(';
  if (is<Lam>(t)) {
    out += '\\';
    out += as<Lam>(t).binder;
    out += ". ";
    printRec(as<Lam>(t).body, Pos::Tail, out);
  } else {
    out += "S ";
    out += as<Shift>(t).binder;
    out += ". ";
    printRec(as<Shift>(t).body, Pos::Tail, out);
  }
  if (parens) out += ')';
}
}  // namespace

std::string printTerm(const Term& t) {
  std::string out;
  printRec(t, Pos::Tail, out);
  return out;
}

std::string printCtx(const EvalCtx& ctx) { return printTerm(plug(ctx, mkVar("_"))); }

// ---------------------------------------------------------------------------
// Canonical renaming.

namespace {
struct Canon {
  std::map<VarId, VarId> freeMap;       // shared across a pair
  std::map<CtxVarId, CtxVarId> freeCtxMap;
  bool renameFree = true;
  unsigned long boundCounter = 0;

  // The % prefix cannot occur in parsed identifiers, so canonical
  // names never collide with variables kept literal.
  VarId freeName(const VarId& x) {
    if (!renameFree) return x;
    auto it = freeMap.find(x);
    if (it != freeMap.end()) return it->second;
    VarId n = numbered("%f", freeMap.size());
    freeMap.emplace(x, n);
    return n;
  }
  CtxVarId freeCtxName(const CtxVarId& a) {
    if (!renameFree) return a;
    auto it = freeCtxMap.find(a);
    if (it != freeCtxMap.end()) return it->second;
    CtxVarId n = numbered("%g", freeCtxMap.size());
    freeCtxMap.emplace(a, n);
    return n;
  }

  Term run(const Term& t, std::map<VarId, VarId>& bound) {
    if (is<Var>(t)) {
      const auto& x = as<Var>(t).name;
      auto it = bound.find(x);
      return mkVar(it != bound.end() ? it->second : freeName(x));
    }
    if (is<App>(t))
      return mkApp(run(as<App>(t).fun, bound), run(as<App>(t).arg, bound));
    if (is<Reset>(t)) return mkReset(run(as<Reset>(t).body, bound));
    if (is<CtxApp>(t))
      return mkCtxApp(freeCtxName(as<CtxApp>(t).cvar), run(as<CtxApp>(t).body, bound));
    const bool isLam = is<Lam>(t);
    const VarId& binder = isLam ? as<Lam>(t).binder : as<Shift>(t).binder;
    const Term& body = isLam ? as<Lam>(t).body : as<Shift>(t).body;
    VarId nb = numbered("%b", boundCounter++);
    auto it = bound.find(binder);
    VarId old;
    bool had = it != bound.end();
    if (had) old = it->second;
    bound[binder] = nb;
    Term nbody = run(body, bound);
    if (had) bound[binder] = old; else bound.erase(binder);
    return isLam ? mkLam(nb, nbody) : mkShift(nb, nbody);
  }
};
}  // namespace

Term alphaNormal(const Term& t) {
  Canon c;
  c.renameFree = false;
  std::map<VarId, VarId> bound;
  return c.run(t, bound);
}

std::string termKey(const Term& t) { return printTerm(alphaNormal(t)); }

std::pair<Term, Term> canonicalizePair(const Term& a, const Term& b) {
  Canon c;
  std::map<VarId, VarId> bound;
  Term ca = c.run(a, bound);
  bound.clear();
  Term cb = c.run(b, bound);
  return {ca, cb};
}

std::string pairKey(const Term& a, const Term& b) {
  auto [ca, cb] = canonicalizePair(a, b);
  return printTerm(ca) + " | " + printTerm(cb);
}

}  // namespace lamshift
