#include "lamshift/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lamshift/app_bisim.hpp"
#include "lamshift/axioms.hpp"
#include "lamshift/cps.hpp"
#include "lamshift/nf_bisim.hpp"
#include "lamshift/sem.hpp"

namespace lamshift {

namespace {

const std::set<std::string> kKeys = {
    "name",   "command", "tag",      "term",  "left",  "right",
    "expect", "steps",   "result",   "flavor", "mode",  "rules",
    "strategy", "toplevel", "fuel",  "depth", "budget"};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void malformed(int line, const std::string& what) {
  std::ostringstream os;
  os << "corpus line " << line << ": " << what;
  throw IllegalInput(os.str());
}

}  // namespace

std::vector<CorpusEntry> parseCorpus(const std::string& text) {
  std::vector<CorpusEntry> entries;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  CorpusEntry cur;
  bool open = false;
  auto flush = [&]() {
    if (!open) return;
    if (cur.name.empty()) malformed(cur.line, "block has no name");
    if (cur.command.empty()) malformed(cur.line, "block has no command");
    if (!cur.fields.count("expect")) malformed(cur.line, "block has no expect");
    entries.push_back(cur);
    cur = CorpusEntry{};
    open = false;
  };
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = trim(raw);
    if (line.rfind("--", 0) == 0) continue;
    if (line.empty()) {
      flush();
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) malformed(lineNo, "expected key: value");
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (!kKeys.count(key)) malformed(lineNo, "unknown key '" + key + "'");
    if (!open) {
      open = true;
      cur.line = lineNo;
    }
    if (key == "name") {
      if (!cur.name.empty()) malformed(lineNo, "duplicate name");
      cur.name = value;
    } else if (key == "command") {
      if (!cur.command.empty()) malformed(lineNo, "duplicate command");
      cur.command = value;
    } else {
      if (cur.fields.count(key)) malformed(lineNo, "duplicate key '" + key + "'");
      cur.fields[key] = value;
    }
  }
  flush();
  return entries;
}

std::vector<CorpusEntry> loadCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IllegalInput("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseCorpus(buf.str());
}

namespace {

long fieldLong(const CorpusEntry& e, const std::string& key, long dflt) {
  auto it = e.fields.find(key);
  if (it == e.fields.end()) return dflt;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    malformed(e.line, "bad number for '" + key + "'");
  }
}

std::string fieldStr(const CorpusEntry& e, const std::string& key,
                     const std::string& dflt = "") {
  auto it = e.fields.find(key);
  return it == e.fields.end() ? dflt : it->second;
}

Term fieldTerm(const CorpusEntry& e, const std::string& key,
               const DefsTable& defs) {
  auto it = e.fields.find(key);
  if (it == e.fields.end())
    malformed(e.line, "command '" + e.command + "' needs '" + key + "'");
  return parseTerm(it->second, defs);
}

SemMode fieldMode(const CorpusEntry& e) {
  SemMode m;
  std::string c = fieldStr(e, "mode", "plain");
  if (c == "extended") m.calculus = Calculus::Extended;
  else if (c != "plain") malformed(e.line, "bad mode '" + c + "'");
  std::string r = fieldStr(e, "rules", "global");
  if (r == "local") m.rules = Rules::Local;
  else if (r != "global") malformed(e.line, "bad rules '" + r + "'");
  std::string s = fieldStr(e, "strategy", "cbv");
  if (s == "cbn") m.strategy = Strategy::CBN;
  else if (s != "cbv") malformed(e.line, "bad strategy '" + s + "'");
  std::string t = fieldStr(e, "toplevel", "relaxed");
  if (t == "original") m.topLevel = TopLevel::Original;
  else if (t != "relaxed") malformed(e.line, "bad toplevel '" + t + "'");
  return m;
}

Flavor fieldFlavor(const CorpusEntry& e) {
  std::string f = fieldStr(e, "flavor", "plain");
  if (f == "plain") return Flavor::Plain;
  if (f == "refined") return Flavor::Refined;
  if (f == "pure") return Flavor::Pure;
  malformed(e.line, "bad flavor '" + f + "'");
}

CorpusOutcome checkVerdict(const CorpusEntry& e, const std::string& got) {
  std::string want = e.fields.at("expect");
  if (got == want) return {e.name, true, "ok: " + got};
  return {e.name, false, "expected " + want + ", got " + got};
}

CorpusOutcome runEval(const CorpusEntry& e, const DefsTable& defs) {
  Term t = fieldTerm(e, "term", defs);
  SemMode m = fieldMode(e);
  long fuel = fieldLong(e, "fuel", 10000);
  EvalOutcome out = evaluate(t, m, fuel);
  std::string got;
  if (std::holds_alternative<Diverges>(out)) got = "diverges";
  else if (std::holds_alternative<FuelExhausted>(out)) got = "fuel";
  else got = std::string("normal:") + kindName(std::get<Normal>(out).kind);
  CorpusOutcome o = checkVerdict(e, got);
  if (!o.pass || !std::holds_alternative<Normal>(out)) return o;
  const Normal& n = std::get<Normal>(out);
  if (e.fields.count("steps")) {
    long want = fieldLong(e, "steps", -1);
    if (n.steps != want) {
      std::ostringstream os;
      os << "expected " << want << " steps, took " << n.steps;
      return {e.name, false, os.str()};
    }
  }
  if (e.fields.count("result")) {
    Term want = parseTerm(e.fields.at("result"), defs);
    if (!alphaEq(n.term, want))
      return {e.name, false, "result " + printTerm(n.term) +
                                 " is not alpha-equal to " + printTerm(want)};
  }
  return o;
}

CorpusOutcome runNf(const CorpusEntry& e, const DefsTable& defs) {
  Term l = fieldTerm(e, "left", defs);
  Term r = fieldTerm(e, "right", defs);
  NfBudget b;
  b.depth = fieldLong(e, "depth", b.depth);
  b.fuel = fieldLong(e, "fuel", b.fuel);
  NfVerdict v = nfBisimCheck(l, r, fieldFlavor(e), b);
  std::string got = std::holds_alternative<NfEquivalent>(v) ? "equivalent"
                    : std::holds_alternative<NfInequivalent>(v)
                        ? "inequivalent"
                        : "unknown";
  return checkVerdict(e, got);
}

CorpusOutcome runApp(const CorpusEntry& e, const DefsTable& defs) {
  Term l = fieldTerm(e, "left", defs);
  Term r = fieldTerm(e, "right", defs);
  AppBudget b;
  b.depth = fieldLong(e, "depth", b.depth);
  b.fuel = fieldLong(e, "fuel", b.fuel);
  AppVerdict v = appBisimCheckOpen(l, r, defaultPool(), b);
  std::string got = std::holds_alternative<AppEquivalent>(v) ? "equivalent"
                    : std::holds_alternative<AppInequivalent>(v)
                        ? "inequivalent"
                        : "unknown";
  return checkVerdict(e, got);
}

CorpusOutcome runDerive(const CorpusEntry& e, const DefsTable& defs) {
  Term l = fieldTerm(e, "left", defs);
  Term r = fieldTerm(e, "right", defs);
  long budget = fieldLong(e, "budget", 50000);
  auto d = deriveAxiomEq(l, r, budget);
  return checkVerdict(e, d ? "derived" : "not-derived");
}

CorpusOutcome runCpsEquiv(const CorpusEntry& e, const DefsTable& defs) {
  Term l = fieldTerm(e, "left", defs);
  Term r = fieldTerm(e, "right", defs);
  long fuel = fieldLong(e, "fuel", 20000);
  return checkVerdict(e, cpsAnswerName(cpsEquiv(l, r, fuel)));
}

}  // namespace

CorpusReport runCorpus(const std::vector<CorpusEntry>& entries,
                       const DefsTable& defs, std::ostream* log,
                       const std::string& filter) {
  CorpusReport report;
  for (const CorpusEntry& e : entries) {
    if (!filter.empty() && e.name.find(filter) == std::string::npos &&
        fieldStr(e, "tag").find(filter) == std::string::npos)
      continue;
    CorpusOutcome o;
    if (e.command == "eval") o = runEval(e, defs);
    else if (e.command == "nf-bisim") o = runNf(e, defs);
    else if (e.command == "app-bisim") o = runApp(e, defs);
    else if (e.command == "derive") o = runDerive(e, defs);
    else if (e.command == "cps-equiv") o = runCpsEquiv(e, defs);
    else malformed(e.line, "unknown command '" + e.command + "'");
    if (o.pass) ++report.passed;
    else ++report.failed;
    if (log)
      *log << (o.pass ? "PASS " : "FAIL ") << o.name
           << (o.pass ? "" : ": " + o.detail) << "\n";
    report.results.push_back(std::move(o));
  }
  if (log)
    *log << report.passed << " passed, " << report.failed << " failed, "
         << report.passed + report.failed << " total\n";
  return report;
}

}  // namespace lamshift
