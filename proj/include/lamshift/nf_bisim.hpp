#pragma once

// Normal-form bisimulation checkers, three flavors:
//   Plain   - plain calculus; control-stuck terms compared part by part
//   Refined - extended calculus (context variables); control-stuck
//             terms compared after capturing into a context variable
//   Pure    - refined game restricted to pure states (values,
//             delimited terms, context applications); entry points are
//             wrapped as @a< t > with a shared fresh context variable
//
// The engine plays the bisimulation game as a worklist over pairs,
// discharging obligations up to reduction, reflexivity, and shared
// evaluation frames (the last only on active obligations), and
// memoizing canonical pairs; a revisited pair is coinductively
// discharged.

#include <string>
#include <variant>
#include <vector>

#include "lamshift/sem.hpp"
#include "lamshift/term.hpp"

namespace lamshift {

enum class Flavor { Plain, Refined, Pure };
const char* flavorName(Flavor f);

enum class Polarity { Active, Passive };

struct Obligation {
  Term left;
  Term right;
  Polarity polarity;
  std::string via;  // clause that generated it
};

struct NfMismatch {
  std::string reason;
};
using Expansion = std::variant<NfMismatch, std::vector<Obligation>>;

// Clause table applied to two normal forms of the flavor's calculus.
// Value and context-stuck argument tests are passive; everything else
// is active. Throws std::logic_error if the pure game reaches a
// control-stuck state or an impure obligation (engine invariants).
Expansion expandPair(const Term& nf0, const Term& nf1, Flavor flavor);

struct UpToOptions {
  bool contextStripping = true;   // strip shared outermost frames (active only)
  bool reductionDischarge = true; // discharge pairs alpha-equal after reduction
};

struct NfBudget {
  long depth = 64;
  long fuel = 10000;
};

struct WitnessPair {
  Term left;
  Term right;
  std::string via;
};
struct NfEquivalent {
  std::vector<WitnessPair> witness;
};
struct NfTraceMove {
  Term left;
  Term right;
  std::string via;
};
struct NfInequivalent {
  std::vector<NfTraceMove> trace;  // root obligation first
  std::string reason;
};
struct NfUnknown {
  std::string reason;  // "fuel" or "depth"
};
using NfVerdict = std::variant<NfEquivalent, NfInequivalent, NfUnknown>;

NfVerdict nfBisimCheck(const Term& t0, const Term& t1, Flavor flavor,
                       NfBudget budget = {}, UpToOptions upto = {});

// One up-to pass over an obligation: evaluate both sides, try refl
// discharge, strip shared frames if allowed. Exposed for testing.
struct UptoResult {
  enum class Status { Discharged, Pair, OutcomeMismatch, Fuel } status;
  Term left;
  Term right;
};
UptoResult uptoNormalize(const Obligation& ob, const UpToOptions& upto,
                         const SemMode& mode, long fuel);

std::string witnessRelation(const NfVerdict& v);

}  // namespace lamshift
