#pragma once

// Two-layer continuation-passing-style translation for the plain
// calculus, beta-eta normalization of its images, and the equivalence
// check "translations have a common beta-eta normal form".

#include <variant>

#include "lamshift/sem.hpp"
#include "lamshift/term.hpp"

namespace lamshift {

// Image contains only Var/Lam/App. Input must be plain.
Term cpsTranslate(const Term& t);

// The initial inner continuation \x. \k2. k2 x.
Term cpsInitialK();

struct Normalized { Term term; long steps; };
struct NormFuel { Term last; long steps; };
using NormResult = std::variant<Normalized, NormFuel>;

// Leftmost-outermost beta reduction to normal form (including under
// binders), then eta postpass, iterated to a fixed point. Revisiting a
// canonical form reports NormFuel early. Input must be Var/Lam/App only.
NormResult betaEtaNormalize(const Term& t, long fuel);

enum class CpsAnswer { Yes, No, Unknown };
const char* cpsAnswerName(CpsAnswer a);

// Yes/No are definitive (normal forms are canonical); Unknown when a
// normalization runs out of fuel.
CpsAnswer cpsEquiv(const Term& t0, const Term& t1, long fuel);

// Applies the translation of a closed plain term to the initial
// continuations (cpsInitialK and the identity) and evaluates the
// resulting lambda term under CBV.
EvalOutcome runCps(const Term& t, long fuel);

}  // namespace lamshift
