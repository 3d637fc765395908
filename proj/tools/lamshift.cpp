// Command line front end. Subcommands map onto the library one to one:
// eval/trace/classify drive the small-step semantics, cps and cps-equiv
// the continuation-passing translation, axioms the equational search,
// nf-bisim and app-bisim the two bisimulation games, corpus the
// regression runner.
//
// Exit codes: 0 success (eval: normal form or detected divergence;
// equivalence checks: positive answer), 1 negative answer (inequivalent,
// refuted, corpus failures), 2 out of budget (fuel, depth, derivation
// nodes), 3 bad input (syntax, unknown names, mode conflicts).

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "lamshift/app_bisim.hpp"
#include "lamshift/axioms.hpp"
#include "lamshift/corpus.hpp"
#include "lamshift/cps.hpp"
#include "lamshift/nf_bisim.hpp"
#include "lamshift/parse.hpp"
#include "lamshift/sem.hpp"
#include "lamshift/term.hpp"

using json = nlohmann::ordered_json;
using namespace lamshift;

namespace {

struct Shared {
  std::string defsPath;
  std::string mode = "plain";
  std::string rules = "global";
  std::string strategy = "cbv";
  std::string toplevel = "relaxed";
  long fuel = 10000;
  bool jsonOut = false;
};

void addCommon(CLI::App* cmd, Shared& sh) {
  cmd->add_option("--defs", sh.defsPath, "definitions file to parse terms against");
  cmd->add_option("--fuel", sh.fuel, "evaluation step budget");
  cmd->add_flag("--json", sh.jsonOut, "machine readable output");
}

void addSemFlags(CLI::App* cmd, Shared& sh) {
  cmd->add_option("--mode", sh.mode, "plain | extended")
      ->check(CLI::IsMember({"plain", "extended"}));
  cmd->add_option("--rules", sh.rules, "global | local")
      ->check(CLI::IsMember({"global", "local"}));
  cmd->add_option("--strategy", sh.strategy, "cbv | cbn")
      ->check(CLI::IsMember({"cbv", "cbn"}));
  cmd->add_option("--toplevel", sh.toplevel, "relaxed | original")
      ->check(CLI::IsMember({"relaxed", "original"}));
}

DefsTable loadDefs(const Shared& sh) {
  if (sh.defsPath.empty()) return {};
  return loadDefsFile(sh.defsPath);
}

SemMode toMode(const Shared& sh) {
  SemMode m;
  if (sh.mode == "extended") m.calculus = Calculus::Extended;
  if (sh.rules == "local") m.rules = Rules::Local;
  if (sh.strategy == "cbn") m.strategy = Strategy::CBN;
  if (sh.toplevel == "original") m.topLevel = TopLevel::Original;
  validateMode(m);
  return m;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

struct TraceLine {
  long n;
  std::string rule;
  Term term;
};

std::vector<TraceLine> runTrace(Term t, const SemMode& m, long fuel) {
  if (m.topLevel == TopLevel::Original && !is<Reset>(t)) t = mkReset(t);
  std::vector<TraceLine> out;
  long n = 0;
  while (n < fuel) {
    auto s = step(t, m);
    if (!s) break;
    ++n;
    out.push_back({n, s->rule, s->term});
    t = s->term;
  }
  return out;
}

int cmdEval(const std::string& text, const Shared& sh, bool withTrace) {
  DefsTable defs = loadDefs(sh);
  Term t = parseTerm(text, defs);
  SemMode m = toMode(sh);
  EvalOutcome out = evaluate(t, m, sh.fuel);

  std::vector<TraceLine> trace;
  if (withTrace) trace = runTrace(t, m, sh.fuel);

  std::string verdict;
  long steps = 0;
  std::string result;
  std::string kind;
  int code = 0;
  if (std::holds_alternative<Normal>(out)) {
    const Normal& n = std::get<Normal>(out);
    verdict = "normal";
    steps = n.steps;
    kind = kindName(n.kind);
    result = printTerm(n.term);
  } else if (std::holds_alternative<Diverges>(out)) {
    verdict = "diverges";
    steps = std::get<Diverges>(out).steps;
  } else {
    verdict = "fuel";
    steps = std::get<FuelExhausted>(out).steps;
    code = 2;
  }

  if (sh.jsonOut) {
    json j;
    j["command"] = "eval";
    j["verdict"] = verdict;
    if (!kind.empty()) j["kind"] = kind;
    j["steps"] = steps;
    if (!result.empty()) j["result"] = result;
    if (withTrace) {
      json arr = json::array();
      for (const auto& l : trace)
        arr.push_back(json{{"step", l.n}, {"rule", l.rule}, {"term", printTerm(l.term)}});
      j["trace"] = arr;
    }
    j["budget"] = json{{"fuel", sh.fuel}};
    emit(j);
    return code;
  }

  for (const auto& l : trace)
    std::cout << l.n << ": " << l.rule << ": " << printTerm(l.term) << "\n";
  if (verdict == "normal")
    std::cout << kind << " (" << steps << " steps): " << result << "\n";
  else if (verdict == "diverges")
    std::cout << "diverges (loop detected after " << steps << " steps)\n";
  else
    std::cout << "fuel exhausted after " << steps << " steps\n";
  return code;
}

int cmdClassify(const std::string& text, const Shared& sh) {
  DefsTable defs = loadDefs(sh);
  Term t = parseTerm(text, defs);
  SemMode m = toMode(sh);
  Decomposition d = decompose(t, m);
  json j;
  j["command"] = "classify";
  if (std::holds_alternative<NFKind>(d)) {
    const NFKind& k = std::get<NFKind>(d);
    j["verdict"] = "normal-form";
    j["kind"] = kindName(k);
    if (sh.jsonOut) emit(j);
    else std::cout << "normal form (" << kindName(k) << "): " << printTerm(t) << "\n";
  } else {
    const RedexInfo& r = std::get<RedexInfo>(d);
    j["verdict"] = "redex";
    j["rule"] = r.rule;
    j["redex"] = printTerm(r.redex);
    j["context"] = printCtx(r.context);
    if (sh.jsonOut) emit(j);
    else
      std::cout << "redex (" << r.rule << "): " << printTerm(r.redex)
                << "\n  in context " << printCtx(r.context) << "\n";
  }
  return 0;
}

int cmdCps(const std::string& text, const Shared& sh, bool normalize, bool run) {
  DefsTable defs = loadDefs(sh);
  Term t = parseTerm(text, defs);
  Term image = cpsTranslate(t);
  json j;
  j["command"] = "cps";
  if (run) {
    EvalOutcome out = runCps(t, sh.fuel);
    if (std::holds_alternative<Normal>(out)) {
      const Normal& n = std::get<Normal>(out);
      j["verdict"] = "normal";
      j["steps"] = n.steps;
      j["result"] = printTerm(n.term);
      if (sh.jsonOut) emit(j);
      else std::cout << printTerm(n.term) << "\n";
      return 0;
    }
    bool div = std::holds_alternative<Diverges>(out);
    j["verdict"] = div ? "diverges" : "fuel";
    if (sh.jsonOut) emit(j);
    else std::cout << (div ? "diverges\n" : "fuel exhausted\n");
    return div ? 0 : 2;
  }
  if (normalize) {
    NormResult r = betaEtaNormalize(image, sh.fuel);
    if (std::holds_alternative<Normalized>(r)) {
      const Normalized& n = std::get<Normalized>(r);
      j["verdict"] = "normalized";
      j["steps"] = n.steps;
      j["result"] = printTerm(n.term);
      if (sh.jsonOut) emit(j);
      else std::cout << printTerm(n.term) << "\n";
      return 0;
    }
    j["verdict"] = "fuel";
    if (sh.jsonOut) emit(j);
    else std::cout << "fuel exhausted while normalizing\n";
    return 2;
  }
  j["verdict"] = "translated";
  j["result"] = printTerm(image);
  if (sh.jsonOut) emit(j);
  else std::cout << printTerm(image) << "\n";
  return 0;
}

int cmdCpsEquiv(const std::string& a, const std::string& b, const Shared& sh) {
  DefsTable defs = loadDefs(sh);
  CpsAnswer ans = cpsEquiv(parseTerm(a, defs), parseTerm(b, defs), sh.fuel);
  if (sh.jsonOut) {
    json j;
    j["command"] = "cps-equiv";
    j["verdict"] = cpsAnswerName(ans);
    j["budget"] = json{{"fuel", sh.fuel}};
    emit(j);
  } else {
    std::cout << cpsAnswerName(ans) << "\n";
  }
  switch (ans) {
    case CpsAnswer::Yes: return 0;
    case CpsAnswer::No: return 1;
    case CpsAnswer::Unknown: return 2;
  }
  return 2;
}

const char* dirName(Direction d) { return d == Direction::LtoR ? "ltr" : "rtl"; }

int cmdAxioms(const std::string& a, const std::string& b, const Shared& sh,
              long budget, bool rewrites) {
  DefsTable defs = loadDefs(sh);
  Term t0 = parseTerm(a, defs);
  if (rewrites) {
    auto rs = axiomRewrites(t0);
    if (sh.jsonOut) {
      json j;
      j["command"] = "axioms";
      j["verdict"] = "rewrites";
      json arr = json::array();
      for (const auto& r : rs)
        arr.push_back(json{{"axiom", axiomName(r.axiom)},
                           {"dir", dirName(r.dir)},
                           {"path", r.path.empty() ? "root" : r.path},
                           {"result", printTerm(r.result)}});
      j["rewrites"] = arr;
      emit(j);
    } else {
      for (const auto& r : rs)
        std::cout << axiomName(r.axiom) << (r.dir == Direction::LtoR ? " -> " : " <- ")
                  << "at " << (r.path.empty() ? "root" : r.path) << ": "
                  << printTerm(r.result) << "\n";
    }
    return 0;
  }
  Term t1 = parseTerm(b, defs);
  auto d = deriveAxiomEq(t0, t1, budget);
  if (sh.jsonOut) {
    json j;
    j["command"] = "axioms";
    j["verdict"] = d ? "derived" : "not-found";
    if (d) {
      json arr = json::array();
      for (const auto& s : d->steps)
        arr.push_back(json{{"axiom", axiomName(s.axiom)},
                           {"dir", dirName(s.dir)},
                           {"path", s.path.empty() ? "root" : s.path},
                           {"term", printTerm(s.result)}});
      j["steps"] = arr;
    }
    j["budget"] = json{{"nodes", budget}};
    emit(j);
  } else if (d) {
    std::cout << printDerivation(t0, *d);
  } else {
    std::cout << "no derivation found within " << budget << " nodes\n";
  }
  return d ? 0 : 2;
}

int cmdNfBisim(const std::string& a, const std::string& b, const Shared& sh,
               const std::string& flavorStr, long depth, bool noCtx, bool noRed) {
  DefsTable defs = loadDefs(sh);
  Flavor flavor = flavorStr == "refined" ? Flavor::Refined
                  : flavorStr == "pure" ? Flavor::Pure
                                        : Flavor::Plain;
  NfBudget budget{depth, sh.fuel};
  UpToOptions upto{!noCtx, !noRed};
  NfVerdict v = nfBisimCheck(parseTerm(a, defs), parseTerm(b, defs), flavor,
                             budget, upto);
  int code = std::holds_alternative<NfEquivalent>(v) ? 0
             : std::holds_alternative<NfInequivalent>(v) ? 1
                                                         : 2;
  if (sh.jsonOut) {
    json j;
    j["command"] = "nf-bisim";
    j["flavor"] = flavorStr;
    if (std::holds_alternative<NfEquivalent>(v)) {
      j["verdict"] = "equivalent";
      json arr = json::array();
      for (const auto& p : std::get<NfEquivalent>(v).witness)
        arr.push_back(json{{"left", printTerm(p.left)},
                           {"right", printTerm(p.right)},
                           {"via", p.via}});
      j["witness"] = arr;
    } else if (std::holds_alternative<NfInequivalent>(v)) {
      const auto& ineq = std::get<NfInequivalent>(v);
      j["verdict"] = "inequivalent";
      j["reason"] = ineq.reason;
      json arr = json::array();
      for (const auto& t : ineq.trace)
        arr.push_back(json{{"left", printTerm(t.left)},
                           {"right", printTerm(t.right)},
                           {"via", t.via}});
      j["trace"] = arr;
    } else {
      j["verdict"] = "unknown";
      j["reason"] = std::get<NfUnknown>(v).reason;
    }
    j["budget"] = json{{"fuel", sh.fuel}, {"depth", depth}};
    emit(j);
  } else {
    std::cout << witnessRelation(v);
  }
  return code;
}

int cmdAppBisim(const std::string& a, const std::string& b, const Shared& sh,
                const std::string& poolPath, long depth) {
  DefsTable defs = loadDefs(sh);
  Pool pool;
  if (poolPath.empty()) {
    pool = defaultPool();
  } else {
    PoolSpec loaded = loadPoolFile(poolPath, defs);
    pool.values = loaded.values;
    pool.contexts = loaded.contexts;
  }
  AppBudget budget{depth, sh.fuel};
  AppVerdict v =
      appBisimCheckOpen(parseTerm(a, defs), parseTerm(b, defs), pool, budget);
  int code = std::holds_alternative<AppEquivalent>(v) ? 0
             : std::holds_alternative<AppInequivalent>(v) ? 1
                                                          : 2;
  if (sh.jsonOut) {
    json j;
    j["command"] = "app-bisim";
    if (std::holds_alternative<AppEquivalent>(v)) {
      const auto& eq = std::get<AppEquivalent>(v);
      j["verdict"] = "equivalent";
      j["bounded"] = eq.bounded;
      j["pairs"] = eq.pairs;
    } else if (std::holds_alternative<AppInequivalent>(v)) {
      const auto& ineq = std::get<AppInequivalent>(v);
      j["verdict"] = "inequivalent";
      j["reason"] = ineq.reason;
      json arr = json::array();
      for (const auto& m : ineq.trace)
        arr.push_back(json{{"label", labelName(m.label)},
                           {"left", printTerm(m.left)},
                           {"right", printTerm(m.right)}});
      j["trace"] = arr;
      if (!ineq.closing.empty()) {
        json c = json::object();
        for (const auto& [x, t] : ineq.closing) c[x] = printTerm(t);
        j["closing"] = c;
      }
      j["context"] = printCtx(synthesizeContext(ineq));
    } else {
      j["verdict"] = "unknown";
      j["reason"] = std::get<AppUnknown>(v).reason;
    }
    j["budget"] = json{{"fuel", sh.fuel}, {"depth", depth}};
    emit(j);
  } else {
    std::cout << describeVerdict(v) << "\n";
    if (std::holds_alternative<AppInequivalent>(v))
      std::cout << "context: "
                << printCtx(synthesizeContext(std::get<AppInequivalent>(v)))
                << "\n";
  }
  return code;
}

int cmdCorpus(const std::string& path, const Shared& sh, const std::string& filter) {
  DefsTable defs = loadDefs(sh);
  auto entries = loadCorpusFile(path);
  if (sh.jsonOut) {
    std::ostringstream devnull;
    CorpusReport rep = runCorpus(entries, defs, &devnull, filter);
    json j;
    j["command"] = "corpus";
    j["verdict"] = rep.failed == 0 ? "pass" : "fail";
    json arr = json::array();
    for (const auto& r : rep.results)
      arr.push_back(json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    j["results"] = arr;
    j["passed"] = rep.passed;
    j["failed"] = rep.failed;
    emit(j);
    return rep.failed == 0 ? 0 : 1;
  }
  CorpusReport rep = runCorpus(entries, defs, &std::cout, filter);
  return rep.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for the lambda calculus with shift and reset"};
  app.require_subcommand(1);

  Shared sh;

  std::string evalTerm;
  auto* evalCmd = app.add_subcommand("eval", "evaluate a term to normal form");
  evalCmd->add_option("term", evalTerm, "term to evaluate")->required();
  bool evalTrace = false;
  evalCmd->add_flag("--trace", evalTrace, "print each step");
  addSemFlags(evalCmd, sh);
  addCommon(evalCmd, sh);

  std::string traceTerm;
  auto* traceCmd = app.add_subcommand("trace", "evaluate, printing every step");
  traceCmd->add_option("term", traceTerm, "term to evaluate")->required();
  addSemFlags(traceCmd, sh);
  addCommon(traceCmd, sh);

  std::string classifyTerm;
  auto* classifyCmd =
      app.add_subcommand("classify", "decompose into redex or normal form");
  classifyCmd->add_option("term", classifyTerm, "term to classify")->required();
  addSemFlags(classifyCmd, sh);
  addCommon(classifyCmd, sh);

  std::string cpsTerm;
  bool cpsNormalize = false, cpsRun = false;
  auto* cpsCmd = app.add_subcommand("cps", "continuation-passing translation");
  cpsCmd->add_option("term", cpsTerm, "term to translate")->required();
  cpsCmd->add_flag("--normalize", cpsNormalize, "beta-eta normalize the image");
  cpsCmd->add_flag("--run", cpsRun, "apply the image to initial continuations and evaluate");
  addCommon(cpsCmd, sh);

  std::string ceLeft, ceRight;
  auto* ceCmd = app.add_subcommand(
      "cps-equiv", "compare beta-eta normal forms of the translations");
  ceCmd->add_option("left", ceLeft)->required();
  ceCmd->add_option("right", ceRight)->required();
  addCommon(ceCmd, sh);

  std::string axLeft, axRight;
  long axBudget = 50000;
  bool axRewrites = false;
  auto* axCmd = app.add_subcommand(
      "axioms", "search for an equational derivation between two terms");
  axCmd->add_option("left", axLeft)->required();
  axCmd->add_option("right", axRight);
  axCmd->add_option("--budget", axBudget, "node expansion budget");
  axCmd->add_flag("--rewrites", axRewrites, "list one-step rewrites of left");
  addCommon(axCmd, sh);

  std::string nfLeft, nfRight, nfFlavor = "plain";
  long nfDepth = 64;
  bool nfNoCtx = false, nfNoRed = false;
  auto* nfCmd = app.add_subcommand("nf-bisim", "normal-form bisimulation game");
  nfCmd->add_option("left", nfLeft)->required();
  nfCmd->add_option("right", nfRight)->required();
  nfCmd->add_option("--flavor", nfFlavor, "plain | refined | pure")
      ->check(CLI::IsMember({"plain", "refined", "pure"}));
  nfCmd->add_option("--depth", nfDepth, "obligation depth budget");
  nfCmd->add_flag("--no-upto-context", nfNoCtx, "disable shared frame stripping");
  nfCmd->add_flag("--no-upto-reduction", nfNoRed,
                  "disable discharge of pairs equal after reduction");
  addCommon(nfCmd, sh);

  std::string apLeft, apRight, apPool;
  long apDepth = 4;
  auto* apCmd = app.add_subcommand("app-bisim", "applicative bisimulation game");
  apCmd->add_option("left", apLeft)->required();
  apCmd->add_option("right", apRight)->required();
  apCmd->add_option("--pool", apPool, "pool file of closing values and probing contexts");
  apCmd->add_option("--depth", apDepth, "game depth budget");
  addCommon(apCmd, sh);

  std::string corpusPath, corpusFilter;
  auto* corpusCmd = app.add_subcommand("corpus", "run a regression corpus");
  corpusCmd->add_option("file", corpusPath, "corpus file")->required();
  corpusCmd->add_option("--filter", corpusFilter, "keep entries whose name or tag contains this");
  addCommon(corpusCmd, sh);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (evalCmd->parsed()) return cmdEval(evalTerm, sh, evalTrace);
    if (traceCmd->parsed()) return cmdEval(traceTerm, sh, true);
    if (classifyCmd->parsed()) return cmdClassify(classifyTerm, sh);
    if (cpsCmd->parsed()) return cmdCps(cpsTerm, sh, cpsNormalize, cpsRun);
    if (ceCmd->parsed()) {
      // translated images take several steps per source step, so the default
      // budget is higher here; an explicit --fuel still wins
      if (!ceCmd->count("--fuel")) sh.fuel = 20000;
      return cmdCpsEquiv(ceLeft, ceRight, sh);
    }
    if (axCmd->parsed()) {
      if (!axRewrites && axRight.empty()) {
        std::cerr << "axioms: right term required unless --rewrites\n";
        return 3;
      }
      return cmdAxioms(axLeft, axRight, sh, axBudget, axRewrites);
    }
    if (nfCmd->parsed())
      return cmdNfBisim(nfLeft, nfRight, sh, nfFlavor, nfDepth, nfNoCtx, nfNoRed);
    if (apCmd->parsed()) return cmdAppBisim(apLeft, apRight, sh, apPool, apDepth);
    if (corpusCmd->parsed()) return cmdCorpus(corpusPath, sh, corpusFilter);
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line << ":" << e.column << ": "
              << e.what() << "\n";
    return 3;
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IllegalInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 3;
}
