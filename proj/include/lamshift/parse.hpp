#pragma once

// Concrete syntax:
//   term  = lam | shf | app
//   lam   = ("\" | "λ") IDENT "." term
//   shf   = ("S" | "shift") IDENT "." term
//   app   = atom { atom }
//   atom  = IDENT | "(" term ")" | "<" term ">" | "@" IDENT "<" term ">"
//   IDENT = letter { letter | digit | "'" | "_" }
// "--" starts a comment running to end of line. "S" and "shift" are
// reserved words. Identifiers naming entries of a definitions table are
// spliced in at parse time (macro expansion, capture is intentional);
// all other identifiers are free variables.
//
// Defs files are sequences of `name = term ;` where later entries may
// reference earlier ones. Pool files use the same entry syntax under
// `[values]` / `[contexts]` section headers; contexts are terms with a
// single `_` hole that must sit in pure evaluation position.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamshift/term.hpp"

namespace lamshift {

struct ParseError : std::runtime_error {
  int line;
  int column;
  std::vector<std::string> expected;
  ParseError(std::string msg, int line, int column, std::vector<std::string> expected);
};

// Forward reference (or self reference) to a definition inside a defs file.
struct UnknownName : std::runtime_error {
  std::string name;
  UnknownName(std::string msg, std::string name);
};

class DefsTable {
 public:
  void define(const std::string& name, Term t);
  const Term* lookup(const std::string& name) const;
  const std::vector<std::pair<std::string, Term>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Term>> entries_;
  std::map<std::string, std::size_t> index_;
};

Term parseTerm(const std::string& text, const DefsTable& defs = {});

// Parses `name = term ;` entries. Names already present in base are
// visible; redefinition within one file is an error. Returns base
// extended with the new entries.
DefsTable parseDefs(const std::string& text, const DefsTable& base = {});
DefsTable loadDefsFile(const std::string& path, const DefsTable& base = {});

struct PoolSpec {
  std::vector<Term> values;      // closed values
  std::vector<EvalCtx> contexts; // closed pure contexts
};
PoolSpec parsePool(const std::string& text, const DefsTable& defs = {});
PoolSpec loadPoolFile(const std::string& path, const DefsTable& defs = {});

// Term-with-one-hole to context conversion; throws IllegalInput if the
// hole is missing, duplicated, or not in pure evaluation position.
EvalCtx parseContext(const std::string& text, const DefsTable& defs = {});

}  // namespace lamshift
