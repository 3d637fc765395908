#pragma once

// Small-step operational semantics: unique decomposition, one-step
// reduction, and fuelled evaluation with loop detection.
//
// Reduction rules by mode:
//   CBV global:  beta_v, reset, shift (capture up to the nearest
//                delimiter), shift_ext (capture through a context
//                variable, extended calculus only)
//   CBV local:   beta_v, reset, shift_elem (one elementary frame),
//                shift_empty (empty captured context)
//   CBN global:  beta_n, reset, shift

#include <optional>
#include <string>
#include <variant>

#include "lamshift/term.hpp"

namespace lamshift {

enum class Strategy { CBV, CBN };
enum class Rules { Global, Local };
enum class Calculus { Plain, Extended };
enum class TopLevel { Relaxed, Original };

struct SemMode {
  Strategy strategy = Strategy::CBV;
  Rules rules = Rules::Global;
  Calculus calculus = Calculus::Plain;
  TopLevel topLevel = TopLevel::Relaxed;
};

// Local rules are defined on the plain CBV calculus; CBN is plain and
// global. Throws IllegalInput on nonsense combinations.
void validateMode(const SemMode& mode);

struct ValueNF { Term v; };
struct ControlStuckNF {            // E[S k. body], E pure
  EvalCtx ctx;
  VarId k;
  Term body;
};
struct OpenStuckNF {               // F[x arg]; arg is a value under CBV
  EvalCtx ctx;
  VarId head;
  Term arg;
};
struct ContextStuckNF {            // F[@a< v >]
  EvalCtx ctx;
  CtxVarId cvar;
  Term value;
};
using NFKind = std::variant<ValueNF, ControlStuckNF, OpenStuckNF, ContextStuckNF>;

std::string kindName(const NFKind& k);  // "value", "control-stuck", ...

// Payload for capture redexes, precomputed during decomposition.
struct CaptureInfo {
  EvalCtx pureE;   // pure part under the delimiter, innermost-first
  Frame delim;     // ResetF or CtxVarF
  VarId k;
  Term body;
};

struct RedexInfo {
  Term redex;
  EvalCtx context;   // surrounding frames, innermost-first
  std::string rule;  // beta_v | beta_n | reset | shift | shift_ext |
                     // shift_elem | shift_empty
  std::optional<CaptureInfo> capture;
};

using Decomposition = std::variant<NFKind, RedexInfo>;
Decomposition decompose(const Term& t, const SemMode& mode);

struct Stepped {
  Term term;
  std::string rule;
};
std::optional<Stepped> step(const Term& t, const SemMode& mode);

struct Normal {
  Term term;
  NFKind kind;
  long steps;
};
struct Diverges {
  Term loopWitness;
  long steps;
};
struct FuelExhausted {
  Term last;
  long steps;
};
using EvalOutcome = std::variant<Normal, Diverges, FuelExhausted>;

EvalOutcome evaluate(const Term& t, const SemMode& mode, long fuel);

// Normal-form kind of t under relaxed global CBV (calculus inferred
// from the term); nullopt when t still reduces.
std::optional<NFKind> classify(const Term& t);

// Splits a context at its innermost delimiter: inner = pure prefix
// plus that delimiter frame, outer = everything outside it.
struct PureOnly { EvalCtx ctx; };
struct SplitCtx { EvalCtx outer; EvalCtx inner; };
using CtxSplit = std::variant<PureOnly, SplitCtx>;
CtxSplit ctxSplit(const EvalCtx& ctx);

}  // namespace lamshift
