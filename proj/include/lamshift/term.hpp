#pragma once

// Core syntax for the call-by-value lambda calculus with shift/reset,
// extended with context variables: terms, evaluation contexts, free
// variables, alpha-equivalence, substitution, and canonical renaming.

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lamshift {

using VarId = std::string;
using CtxVarId = std::string;

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct Var { VarId name; };
struct Lam { VarId binder; Term body; };
struct App { Term fun; Term arg; };
struct Shift { VarId binder; Term body; };       // S k. body
struct Reset { Term body; };                     // <body>
struct CtxApp { CtxVarId cvar; Term body; };     // @a< body >

struct TermNode {
  std::variant<Var, Lam, App, Shift, Reset, CtxApp> v;
};

// Raised when an operation is applied outside its domain
// (extended term fed to a plain-only operation, open term where a
// closed one is required, and so on).
struct IllegalInput : std::runtime_error {
  explicit IllegalInput(const std::string& what) : std::runtime_error(what) {}
};

Term mkVar(VarId name);
Term mkLam(VarId binder, Term body);
Term mkApp(Term fun, Term arg);
Term mkShift(VarId binder, Term body);
Term mkReset(Term body);
Term mkCtxApp(CtxVarId cvar, Term body);

template <class T>
bool is(const Term& t) { return std::holds_alternative<T>(t->v); }

template <class T>
const T& as(const Term& t) { return std::get<T>(t->v); }

bool isValue(const Term& t);            // variable or lambda
bool isPlain(const Term& t);            // no context applications anywhere
bool isPure(const Term& t);             // value, <t>, or @a< t >

// Number of nodes with sharing unfolded (what printing would produce).
// Memoized over shared subterms; saturates at the given cap.
std::size_t termSize(const Term& t, std::size_t cap = SIZE_MAX);

struct VarSets {
  std::set<VarId> vars;
  std::set<CtxVarId> ctxVars;
};
VarSets freeVars(const Term& t);

bool alphaEq(const Term& a, const Term& b);

// Capture-avoiding substitution of an arbitrary term for a variable.
// substValue additionally checks that the replacement is a value.
Term substTerm(const Term& t, const VarId& x, const Term& s);
Term substValue(const Term& t, const VarId& x, const Term& v);

// Least-stamped name base+N (N = 0,1,2,...) not present in avoid.
VarId freshVar(const std::set<VarId>& avoid, const std::string& base = "x");
CtxVarId freshCtxVar(const std::set<CtxVarId>& avoid,
                     const std::string& base = "a");

// ---------------------------------------------------------------------------
// Evaluation contexts: innermost-first frame lists.

struct AppL { Term arg; };     // [] arg
struct AppR { Term fun; };     // fun [], fun a value
struct ResetF {};              // < [] >
struct CtxVarF { CtxVarId cvar; };  // @a< [] >

using Frame = std::variant<AppL, AppR, ResetF, CtxVarF>;

struct EvalCtx {
  std::vector<Frame> frames;   // frames[0] is nearest the hole
};

Term plug(const EvalCtx& ctx, Term t);
Term plugFrame(const Frame& f, Term t);

bool isPureCtx(const EvalCtx& ctx);     // no Reset/CtxVar frames
bool isDelimiterFrame(const Frame& f);
VarSets freeVarsCtx(const EvalCtx& ctx);
EvalCtx composeCtx(const EvalCtx& outer, const EvalCtx& inner);

// Substitutes the delimited context d for the context variable a:
// @a< t > becomes d[ t{d/a} ]. Capture-avoiding for the value
// variables free in d.
Term substCtx(const Term& t, const CtxVarId& a, const EvalCtx& d);

// ---------------------------------------------------------------------------
// Printing and canonical forms.

std::string printTerm(const Term& t);
// Context printed as the term obtained by plugging "_" into the hole.
std::string printCtx(const EvalCtx& ctx);

// Renames bound variables to position-canonical names, leaves free
// variables untouched. alphaEq(a, b) iff printTerm(alphaNormal(a)) ==
// printTerm(alphaNormal(b)).
Term alphaNormal(const Term& t);
std::string termKey(const Term& t);

// Jointly renames the free (term and context) variables of the pair in
// first-occurrence order, left term scanned first, then renames bound
// variables canonically. Equal keys iff the pairs match up to a
// consistent renaming of free variables plus alpha-equivalence.
std::pair<Term, Term> canonicalizePair(const Term& a, const Term& b);
std::string pairKey(const Term& a, const Term& b);

}  // namespace lamshift
