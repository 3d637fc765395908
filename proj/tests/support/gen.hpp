#pragma once

// Seeded random term generators for the property tests. Everything is
// deterministic in the seed so failures reproduce.

#include <random>
#include <string>
#include <vector>

#include "lamshift/term.hpp"

namespace lamshift::testgen {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  }
};

struct GenOptions {
  int depth = 5;
  bool controlOps = true;  // shift and reset nodes
  bool freeVars = true;    // draw from a small free alphabet
};

inline const std::vector<VarId>& freeAlphabet() {
  static const std::vector<VarId> names = {"u", "v", "w"};
  return names;
}

inline Term genTerm(Gen& g, const GenOptions& opt, int depth,
                    std::vector<VarId>& scope) {
  auto var = [&]() -> Term {
    if (!scope.empty() && (!opt.freeVars || g.chance(0.7)))
      return mkVar(scope[g.pick(scope.size())]);
    if (opt.freeVars) return mkVar(freeAlphabet()[g.pick(freeAlphabet().size())]);
    // closed generation with empty scope: fall back to the identity
    return mkLam("x", mkVar("x"));
  };
  if (depth <= 0) return var();
  int roll = static_cast<int>(g.pick(opt.controlOps ? 10 : 6));
  switch (roll) {
    case 0:
    case 1:
      return var();
    case 2:
    case 3: {  // lambda
      VarId x = "b" + std::to_string(scope.size());
      scope.push_back(x);
      Term body = genTerm(g, opt, depth - 1, scope);
      scope.pop_back();
      return mkLam(x, body);
    }
    case 4:
    case 5: {
      Term f = genTerm(g, opt, depth - 1, scope);
      Term a = genTerm(g, opt, depth - 1, scope);
      return mkApp(f, a);
    }
    case 6:
    case 7:
      return mkReset(genTerm(g, opt, depth - 1, scope));
    default: {  // shift
      VarId k = "c" + std::to_string(scope.size());
      scope.push_back(k);
      Term body = genTerm(g, opt, depth - 1, scope);
      scope.pop_back();
      return mkShift(k, body);
    }
  }
}

inline Term genTerm(Gen& g, const GenOptions& opt = {}) {
  std::vector<VarId> scope;
  return genTerm(g, opt, opt.depth, scope);
}

inline Term genClosedTerm(Gen& g, int depth = 5, bool controlOps = true) {
  GenOptions opt;
  opt.depth = depth;
  opt.controlOps = controlOps;
  opt.freeVars = false;
  return genTerm(g, opt);
}

inline Term genValue(Gen& g, const GenOptions& opt = {}) {
  std::vector<VarId> scope;
  VarId x = "b0";
  scope.push_back(x);
  Term body = genTerm(g, opt, opt.depth - 1, scope);
  return mkLam(x, body);
}

// Pure evaluation context of the given length: a mix of "apply to t"
// and "value applied to hole" frames, innermost first.
inline EvalCtx genPureCtx(Gen& g, int frames, const GenOptions& opt = {}) {
  EvalCtx ctx;
  for (int i = 0; i < frames; ++i) {
    if (g.chance(0.5)) {
      ctx.frames.push_back(AppL{genTerm(g, opt)});
    } else {
      ctx.frames.push_back(AppR{genValue(g, opt)});
    }
  }
  return ctx;
}

// Renames every binder to a fresh name; the result is alpha-equal to
// the input but usually not structurally identical.
inline Term alphaShuffle(const Term& t, long& counter) {
  if (is<Var>(t)) return t;
  if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    VarId nx = "r" + std::to_string(counter++);
    return mkLam(nx, substValue(alphaShuffle(n.body, counter), n.binder, mkVar(nx)));
  }
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    Term f = alphaShuffle(n.fun, counter);
    return mkApp(f, alphaShuffle(n.arg, counter));
  }
  if (is<Shift>(t)) {
    const auto& n = as<Shift>(t);
    VarId nk = "r" + std::to_string(counter++);
    return mkShift(nk, substValue(alphaShuffle(n.body, counter), n.binder, mkVar(nk)));
  }
  if (is<Reset>(t)) return mkReset(alphaShuffle(as<Reset>(t).body, counter));
  const auto& n = as<CtxApp>(t);
  return mkCtxApp(n.cvar, alphaShuffle(n.body, counter));
}

inline Term alphaShuffle(const Term& t) {
  long counter = 0;
  return alphaShuffle(t, counter);
}

}  // namespace lamshift::testgen
