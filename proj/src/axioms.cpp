#include "lamshift/axioms.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace lamshift {

const char* axiomName(AxiomName a) {
  switch (a) {
    case AxiomName::beta_v: return "beta_v";
    case AxiomName::beta_Omega: return "beta_Omega";
    case AxiomName::reset_shift: return "reset_shift";
    case AxiomName::reset_lift: return "reset_lift";
    case AxiomName::reset_value: return "reset_value";
    case AxiomName::shift_reset: return "shift_reset";
    case AxiomName::eta_v: return "eta_v";
    case AxiomName::shift_elim: return "shift_elim";
  }
  return "?";
}

namespace {

// All splits t = E[sub] with E a pure context, innermost-first frames,
// including the trivial split.
void pureSplits(const Term& t, std::vector<std::pair<EvalCtx, Term>>& out,
                EvalCtx prefix = {}) {
  out.emplace_back(prefix, t);
  if (!is<App>(t)) return;
  const auto& n = as<App>(t);
  {
    EvalCtx viaFun = prefix;
    viaFun.frames.insert(viaFun.frames.begin(), AppL{n.arg});
    pureSplits(n.fun, out, viaFun);
  }
  if (isValue(n.fun)) {
    EvalCtx viaArg = prefix;
    viaArg.frames.insert(viaArg.frames.begin(), AppR{n.fun});
    pureSplits(n.arg, out, viaArg);
  }
}

std::set<VarId> avoidFor(const EvalCtx& e, const Term& t) {
  std::set<VarId> avoid = freeVarsCtx(e).vars;
  for (const auto& v : freeVars(t).vars) avoid.insert(v);
  return avoid;
}

struct Collector {
  std::vector<Rewrite> out;

  void add(Term result, AxiomName ax, Direction dir, const std::string& path) {
    out.push_back({std::move(result), ax, dir, path});
  }

  void atNode(const Term& t, const std::string& path) {
    // beta_v ->
    if (is<App>(t)) {
      const auto& n = as<App>(t);
      if (is<Lam>(n.fun) && isValue(n.arg)) {
        const auto& lam = as<Lam>(n.fun);
        add(substValue(lam.body, lam.binder, n.arg), AxiomName::beta_v,
            Direction::LtoR, path);
      }
    }
    // beta_Omega ->  : (\x. E[x]) t with x not free in E
    if (is<App>(t) && is<Lam>(as<App>(t).fun)) {
      const auto& n = as<App>(t);
      const auto& lam = as<Lam>(n.fun);
      std::vector<std::pair<EvalCtx, Term>> splits;
      pureSplits(lam.body, splits);
      for (const auto& [e, sub] : splits) {
        if (!is<Var>(sub) || as<Var>(sub).name != lam.binder) continue;
        if (freeVarsCtx(e).vars.count(lam.binder)) continue;
        add(plug(e, n.arg), AxiomName::beta_Omega, Direction::LtoR, path);
      }
    }
    // beta_Omega <- : t = E[sub] becomes (\x. E[x]) sub
    {
      std::vector<std::pair<EvalCtx, Term>> splits;
      pureSplits(t, splits);
      for (const auto& [e, sub] : splits) {
        VarId x = freshVar(avoidFor(e, sub));
        add(mkApp(mkLam(x, plug(e, mkVar(x))), sub), AxiomName::beta_Omega,
            Direction::RtoL, path);
      }
    }
    if (is<Reset>(t)) {
      const auto& body = as<Reset>(t).body;
      // reset_shift ->
      std::vector<std::pair<EvalCtx, Term>> splits;
      pureSplits(body, splits);
      for (const auto& [e, sub] : splits) {
        if (!is<Shift>(sub)) continue;
        const auto& sh = as<Shift>(sub);
        std::set<VarId> avoid = avoidFor(e, sh.body);
        avoid.insert(sh.binder);
        VarId x = freshVar(avoid);
        Term cont = mkLam(x, mkReset(plug(e, mkVar(x))));
        add(mkReset(substValue(sh.body, sh.binder, cont)), AxiomName::reset_shift,
            Direction::LtoR, path);
      }
      // reset_lift ->
      if (is<App>(body)) {
        const auto& app = as<App>(body);
        if (is<Lam>(app.fun) && is<Reset>(app.arg)) {
          const auto& lam = as<Lam>(app.fun);
          add(mkApp(mkLam(lam.binder, mkReset(lam.body)), app.arg),
              AxiomName::reset_lift, Direction::LtoR, path);
        }
      }
      // reset_value ->
      if (isValue(body)) add(body, AxiomName::reset_value, Direction::LtoR, path);
    }
    // reset_lift <-
    if (is<App>(t)) {
      const auto& n = as<App>(t);
      if (is<Lam>(n.fun) && is<Reset>(as<Lam>(n.fun).body) && is<Reset>(n.arg)) {
        const auto& lam = as<Lam>(n.fun);
        add(mkReset(mkApp(mkLam(lam.binder, as<Reset>(lam.body).body), n.arg)),
            AxiomName::reset_lift, Direction::RtoL, path);
      }
    }
    // reset_value <-
    if (isValue(t)) add(mkReset(t), AxiomName::reset_value, Direction::RtoL, path);
    if (is<Shift>(t)) {
      const auto& sh = as<Shift>(t);
      // shift_reset ->
      if (is<Reset>(sh.body))
        add(mkShift(sh.binder, as<Reset>(sh.body).body), AxiomName::shift_reset,
            Direction::LtoR, path);
      // shift_reset <-
      add(mkShift(sh.binder, mkReset(sh.body)), AxiomName::shift_reset,
          Direction::RtoL, path);
      // shift_elim -> : S k. k t with k not free in t
      if (is<App>(sh.body)) {
        const auto& app = as<App>(sh.body);
        if (is<Var>(app.fun) && as<Var>(app.fun).name == sh.binder &&
            !freeVars(app.arg).vars.count(sh.binder))
          add(app.arg, AxiomName::shift_elim, Direction::LtoR, path);
      }
    }
    // shift_elim <-
    {
      VarId k = freshVar(freeVars(t).vars, "k");
      add(mkShift(k, mkApp(mkVar(k), t)), AxiomName::shift_elim, Direction::RtoL,
          path);
    }
    // eta_v -> : \x. v x with x not free in v
    if (is<Lam>(t)) {
      const auto& lam = as<Lam>(t);
      if (is<App>(lam.body)) {
        const auto& app = as<App>(lam.body);
        if (isValue(app.fun) && is<Var>(app.arg) &&
            as<Var>(app.arg).name == lam.binder &&
            !freeVars(app.fun).vars.count(lam.binder))
          add(app.fun, AxiomName::eta_v, Direction::LtoR, path);
      }
    }
    // eta_v <-
    if (isValue(t)) {
      VarId x = freshVar(freeVars(t).vars);
      add(mkLam(x, mkApp(t, mkVar(x))), AxiomName::eta_v, Direction::RtoL, path);
    }
  }
};

std::string childPath(const std::string& path, int i) {
  return path.empty() ? std::to_string(i) : path + "." + std::to_string(i);
}

void rewriteRec(const Term& t, const std::string& path, Collector& c,
                std::vector<Rewrite>& out) {
  c.out.clear();
  c.atNode(t, path);
  for (auto& r : c.out) out.push_back(std::move(r));

  auto child = [&](const Term& sub, int idx, auto rebuild) {
    std::vector<Rewrite> inner;
    rewriteRec(sub, childPath(path, idx), c, inner);
    for (auto& r : inner) {
      r.result = rebuild(r.result);
      out.push_back(std::move(r));
    }
  };
  if (is<Lam>(t)) {
    const auto& n = as<Lam>(t);
    child(n.body, 0, [&](Term b) { return mkLam(n.binder, std::move(b)); });
  } else if (is<Shift>(t)) {
    const auto& n = as<Shift>(t);
    child(n.body, 0, [&](Term b) { return mkShift(n.binder, std::move(b)); });
  } else if (is<Reset>(t)) {
    const auto& n = as<Reset>(t);
    child(n.body, 0, [&](Term b) { return mkReset(std::move(b)); });
  } else if (is<App>(t)) {
    const auto& n = as<App>(t);
    child(n.fun, 0, [&](Term f) { return mkApp(std::move(f), n.arg); });
    child(n.arg, 1, [&](Term a) { return mkApp(n.fun, std::move(a)); });
  }
}

}  // namespace

std::vector<Rewrite> axiomRewrites(const Term& t) {
  if (!isPlain(t)) throw IllegalInput("axiomRewrites: extended terms unsupported");
  std::vector<Rewrite> out;
  Collector c;
  rewriteRec(t, "", c, out);
  return out;
}

namespace {

struct Node {
  Term term;
  int parent;      // -1 for a root
  DerivStep step;  // step applied at the parent to reach this node
};

Direction flip(Direction d) {
  return d == Direction::LtoR ? Direction::RtoL : Direction::LtoR;
}

}  // namespace

std::optional<Derivation> deriveAxiomEq(const Term& t0, const Term& t1, long budget) {
  if (!isPlain(t0) || !isPlain(t1))
    throw IllegalInput("deriveAxiomEq: extended terms unsupported");
  if (alphaEq(t0, t1)) return Derivation{};

  std::vector<Node> nodes;
  std::map<std::string, int> seenL, seenR;  // canonical key -> node index
  std::deque<int> queueL, queueR;

  nodes.push_back({t0, -1, {}});
  seenL[termKey(t0)] = 0;
  queueL.push_back(0);
  nodes.push_back({t1, -1, {}});
  seenR[termKey(t1)] = 1;
  queueR.push_back(1);

  // Left-side steps walk root -> node; right-side steps get flipped so
  // the final derivation reads t0 -> ... -> t1.
  auto build = [&](int leftNode, int rightNode) {
    Derivation d;
    std::vector<DerivStep> up;
    for (int n = leftNode; nodes[n].parent >= 0; n = nodes[n].parent)
      up.push_back(nodes[n].step);
    d.steps.assign(up.rbegin(), up.rend());
    for (int n = rightNode; nodes[n].parent >= 0; n = nodes[n].parent) {
      DerivStep s = nodes[n].step;
      d.steps.push_back(
          {s.axiom, flip(s.dir), s.path, nodes[nodes[n].parent].term});
    }
    return d;
  };

  while ((!queueL.empty() || !queueR.empty()) &&
         static_cast<long>(nodes.size()) < budget) {
    bool fromLeft;
    if (queueL.empty()) fromLeft = false;
    else if (queueR.empty()) fromLeft = true;
    else fromLeft = queueL.size() <= queueR.size();

    auto& queue = fromLeft ? queueL : queueR;
    auto& mine = fromLeft ? seenL : seenR;
    auto& other = fromLeft ? seenR : seenL;
    int id = queue.front();
    queue.pop_front();

    for (const Rewrite& rw : axiomRewrites(nodes[id].term)) {
      if (static_cast<long>(nodes.size()) >= budget) break;
      std::string key = termKey(rw.result);
      if (mine.count(key)) continue;
      int nid = int(nodes.size());
      nodes.push_back({rw.result, id, {rw.axiom, rw.dir, rw.path, rw.result}});
      mine[key] = nid;
      auto hit = other.find(key);
      if (hit != other.end()) {
        return fromLeft ? build(nid, hit->second) : build(hit->second, nid);
      }
      queue.push_back(nid);
    }
  }
  return std::nullopt;
}

namespace {

// Looks for an enumerated rewrite matching the recorded step.
bool stepMatches(const Term& from, const Term& to, AxiomName ax, Direction dir,
                 const std::string& path) {
  for (const Rewrite& rw : axiomRewrites(from)) {
    if (rw.axiom == ax && rw.dir == dir && rw.path == path &&
        alphaEq(rw.result, to))
      return true;
  }
  return false;
}

}  // namespace

bool replayDerivation(const Term& t0, const Term& t1, const Derivation& d) {
  Term cur = t0;
  for (const DerivStep& s : d.steps) {
    if (!stepMatches(cur, s.result, s.axiom, s.dir, s.path) &&
        !stepMatches(s.result, cur, s.axiom, flip(s.dir), s.path))
      return false;
    cur = s.result;
  }
  return alphaEq(cur, t1);
}

std::string printDerivation(const Term& t0, const Derivation& d) {
  std::ostringstream out;
  out << printTerm(t0) << "\n";
  for (const DerivStep& s : d.steps) {
    out << "  = { " << axiomName(s.axiom)
        << (s.dir == Direction::LtoR ? " -> " : " <- ") << "at ["
        << (s.path.empty() ? "root" : s.path) << "] }\n";
    out << printTerm(s.result) << "\n";
  }
  return out.str();
}

}  // namespace lamshift
