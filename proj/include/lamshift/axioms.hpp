#pragma once

// The eight direct-style axioms as an oriented rewrite system, plus a
// budgeted bidirectional search for equational derivations.
//
//   beta_v      (\x. t) v            = t{v/x}
//   beta_Omega  (\x. E[x]) t         = E[t]        x not free in E
//   reset_shift <E[S k. t]>          = <t{\x. <E[x]> / k}>
//   reset_lift  <(\x. t0) <t1>>      = (\x. <t0>) <t1>
//   reset_value <v>                  = v
//   shift_reset S k. <t>             = S k. t
//   eta_v       \x. v x              = v            x not free in v
//   shift_elim  S k. k t             = t            k not free in t
//
// All operations are restricted to plain terms.

#include <optional>
#include <string>
#include <vector>

#include "lamshift/term.hpp"

namespace lamshift {

enum class AxiomName {
  beta_v, beta_Omega, reset_shift, reset_lift, reset_value,
  shift_reset, eta_v, shift_elim
};
const char* axiomName(AxiomName a);

enum class Direction { LtoR, RtoL };

struct Rewrite {
  Term result;
  AxiomName axiom;
  Direction dir;
  std::string path;  // dot-joined child indices; "" is the root
};

// Every rewrite of t that applies one axiom instance at one subterm
// position, in either orientation. The expanding orientations of
// beta_v and reset_shift (guessing a substitution) are not enumerable
// and are omitted; the search below compensates by working from both
// end points.
std::vector<Rewrite> axiomRewrites(const Term& t);

struct DerivStep {
  AxiomName axiom;
  Direction dir;
  std::string path;
  Term result;  // term after this step
};
struct Derivation {
  std::vector<DerivStep> steps;
};

// Bidirectional breadth-first search over axiomRewrites from both
// sides; budget bounds the number of stored search states, which keeps
// memory proportional to it. nullopt means not found within budget
// (inconclusive).
std::optional<Derivation> deriveAxiomEq(const Term& t0, const Term& t1, long budget);

// Checks each step: the recorded axiom instance at the recorded path
// transforms step i's predecessor into its result (in whichever
// orientation is enumerable), and the chain links t0 to t1.
bool replayDerivation(const Term& t0, const Term& t1, const Derivation& d);

std::string printDerivation(const Term& t0, const Derivation& d);

}  // namespace lamshift
