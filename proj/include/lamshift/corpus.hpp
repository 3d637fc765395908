#pragma once

// Regression corpus: a text file of blank-line separated blocks of
// "key: value" lines. Each block names a check against one of the
// engines. Lines starting with "--" are comments.
//
// Keys: name, command, tag, and per command:
//   eval      term, expect (normal:<kind> | diverges | fuel),
//             steps (exact count), result (alpha-eq normal form),
//             mode (plain|extended), rules (global|local),
//             strategy (cbv|cbn), toplevel (relaxed|original), fuel
//   nf-bisim  left, right, flavor (plain|refined|pure), depth, fuel,
//             expect (equivalent | inequivalent | unknown)
//   app-bisim left, right, depth, fuel,
//             expect (equivalent | inequivalent | unknown)
//   derive    left, right, budget, expect (derived | not-derived)
//   cps-equiv left, right, fuel, expect (yes | no | unknown)

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "lamshift/parse.hpp"

namespace lamshift {

struct CorpusEntry {
  std::string name;
  std::string command;
  std::map<std::string, std::string> fields;  // remaining keys
  int line;                                   // first line of the block
};

// Throws IllegalInput on malformed blocks (unknown or duplicate keys,
// missing name/command/expect).
std::vector<CorpusEntry> parseCorpus(const std::string& text);
std::vector<CorpusEntry> loadCorpusFile(const std::string& path);

struct CorpusOutcome {
  std::string name;
  bool pass;
  std::string detail;  // what was expected vs what happened
};
struct CorpusReport {
  std::vector<CorpusOutcome> results;
  int passed = 0;
  int failed = 0;
};

// Runs entries in order; writes one PASS/FAIL line per entry plus a
// summary to log if given. filter keeps entries whose name or tag
// contains it. Term fields are parsed against defs.
CorpusReport runCorpus(const std::vector<CorpusEntry>& entries,
                       const DefsTable& defs, std::ostream* log,
                       const std::string& filter = "");

}  // namespace lamshift
