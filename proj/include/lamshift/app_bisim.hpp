#pragma once

// Applicative bisimulation over a labelled transition system:
//   tau      - one evaluation step
//   arg v    - apply a value to an argument value from the pool
//   ctx E    - surround a control-stuck term with < E[_] >, which
//              triggers the capture
//
// The checker plays the weak game (tau-steps folded into evaluation)
// over finite pools of closing values and probing contexts, bounded in
// depth, and memoizes canonical pairs. Open terms are handled by
// enumerating pool closings of their free variables. Inequivalence
// traces can be turned back into a single discriminating context and
// validated by direct evaluation.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lamshift/sem.hpp"
#include "lamshift/term.hpp"

namespace lamshift {

struct Pool {
  std::vector<Term> values;
  std::vector<EvalCtx> contexts;
};

// Small discriminating pool: identity, self-application, a diverger,
// an aborting value, a delimited prober; empty, applying, diverging
// and discarding contexts.
Pool defaultPool();

struct TauL {};
struct ArgL {
  Term value;
};
struct CtxL {
  EvalCtx ctx;
};
using Label = std::variant<TauL, ArgL, CtxL>;

std::string labelName(const Label& l);

// One transition, or nullopt if the label is not enabled.
std::optional<Term> ltsStep(const Term& t, const Label& l);

enum class Observation { Value, Stuck, Diverge, Unknown };
const char* observationName(Observation o);

// Terminal observation after evaluating: which clause of the game the
// term offers. Requires a closed plain term.
Observation enabledObservation(const Term& t, long fuel);

struct AppBudget {
  long depth = 4;
  long fuel = 10000;
};

struct AppMove {
  Label label;
  Term left;
  Term right;
};

struct AppEquivalent {
  bool bounded;  // true if some branch was cut off by the depth budget
  long pairs;    // size of the explored relation
};
struct AppInequivalent {
  std::vector<AppMove> trace;  // root first; label of root is tau
  std::string reason;
  std::map<VarId, Term> closing;  // for open terms: the refuting closing
};
struct AppUnknown {
  std::string reason;
};
using AppVerdict = std::variant<AppEquivalent, AppInequivalent, AppUnknown>;

// Closed game. Throws IllegalInput on open or non-plain input.
AppVerdict appBisimCheck(const Term& t0, const Term& t1, const Pool& pool,
                         AppBudget budget = {});

// Closes free variables with every pool-value assignment and requires
// the closed game to agree on all of them.
AppVerdict appBisimCheckOpen(const Term& t0, const Term& t1, const Pool& pool,
                             AppBudget budget = {});

// Rebuild a discriminating context from a refutation trace: arg moves
// become application frames, ctx moves add the probed context and its
// delimiter.
EvalCtx synthesizeContext(const AppInequivalent& ineq);

// Replays a refutation: applies the closing, plugs both terms into the
// synthesized context, and checks the observations really differ.
bool validateWitness(const Term& t0, const Term& t1,
                     const AppInequivalent& ineq, long fuel = 10000);

std::string describeVerdict(const AppVerdict& v);

}  // namespace lamshift
