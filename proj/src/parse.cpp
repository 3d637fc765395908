#include "lamshift/parse.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace lamshift {

ParseError::ParseError(std::string msg, int line, int column,
                       std::vector<std::string> expected)
    : std::runtime_error(msg + " at " + std::to_string(line) + ":" +
                         std::to_string(column)),
      line(line),
      column(column),
      expected(std::move(expected)) {}

UnknownName::UnknownName(std::string msg, std::string name)
    : std::runtime_error(std::move(msg)), name(std::move(name)) {}

void DefsTable::define(const std::string& name, Term t) {
  auto it = index_.find(name);
  if (it != index_.end()) {
    entries_[it->second].second = std::move(t);
    return;
  }
  index_.emplace(name, entries_.size());
  entries_.emplace_back(name, std::move(t));
}

const Term* DefsTable::lookup(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

namespace {

enum class Tok {
  LamKw, ShiftKw, Dot, LParen, RParen, LAngle, RAngle, At, Ident, Hole,
  Equals, Semi, LBracket, RBracket, End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

const char* tokName(Tok k) {
  switch (k) {
    case Tok::LamKw: return "'\\'";
    case Tok::ShiftKw: return "'S'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::At: return "'@'";
    case Tok::Ident: return "identifier";
    case Tok::Hole: return "'_'";
    case Tok::Equals: return "'='";
    case Tok::Semi: return "';'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool identStart(unsigned char c) { return std::isalpha(c); }
bool identCont(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c == '_';
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text) {
    out.push_back({k, std::move(text), line, col});
  };
  while (i < s.size()) {
    unsigned char c = s[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (std::isspace(c)) { ++col; ++i; continue; }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    // UTF-8 lambda
    if (c == 0xCE && i + 1 < s.size() && (unsigned char)s[i + 1] == 0xBB) {
      push(Tok::LamKw, "λ");
      i += 2; col += 1;
      continue;
    }
    if (identStart(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && identCont(s[j])) ++j;
      std::string name = s.substr(i, j - i);
      if (name == "S" || name == "shift") push(Tok::ShiftKw, name);
      else push(Tok::Ident, name);
      col += int(j - i);
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '\\': k = Tok::LamKw; break;
      case '.': k = Tok::Dot; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '<': k = Tok::LAngle; break;
      case '>': k = Tok::RAngle; break;
      case '@': k = Tok::At; break;
      case '_': k = Tok::Hole; break;
      case '=': k = Tok::Equals; break;
      case ';': k = Tok::Semi; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      default:
        throw ParseError(std::string("unexpected character '") + char(c) + "'",
                         line, col, {});
    }
    if (k == Tok::Hole && i + 1 < s.size() && identCont(s[i + 1]))
      throw ParseError("identifiers may not start with '_'", line, col, {});
    push(k, std::string(1, char(c)));
    ++i; ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const DefsTable& defs, bool allowHole)
      : toks_(std::move(toks)), defs_(&defs), allowHole_(allowHole) {}

  // Names defined later in the same defs file; referencing one is an error.
  std::set<std::string> pendingNames;

  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool at(Tok k) const { return peek().kind == k; }

  Token expect(Tok k) {
    if (!at(k)) fail(std::string("expected ") + tokName(k), {tokName(k)});
    return take();
  }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> exp) const {
    const Token& t = peek();
    throw ParseError(msg + ", found " + (t.kind == Tok::End ? "end of input"
                                                            : "'" + t.text + "'"),
                     t.line, t.col, std::move(exp));
  }

  Term parseTermTop() {
    Term t = term();
    if (!at(Tok::End)) fail("trailing input after term", {"end of input"});
    return t;
  }

  Term term() {
    if (at(Tok::LamKw)) {
      take();
      std::string x = expect(Tok::Ident).text;
      expect(Tok::Dot);
      bound_.insert(x);
      Term b = term();
      eraseOne(x);
      return mkLam(x, b);
    }
    if (at(Tok::ShiftKw)) {
      take();
      std::string k = expect(Tok::Ident).text;
      expect(Tok::Dot);
      bound_.insert(k);
      Term b = term();
      eraseOne(k);
      return mkShift(k, b);
    }
    return app();
  }

  bool atAtom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::LParen:
      case Tok::LAngle:
      case Tok::At:
        return true;
      case Tok::Hole:
        return allowHole_;
      default:
        return false;
    }
  }

  Term app() {
    if (!atAtom())
      fail("expected a term", {"identifier", "'('", "'<'", "'@'", "'\\'", "'S'"});
    Term t = atom();
    while (atAtom()) t = mkApp(t, atom());
    return t;
  }

  Term atom() {
    if (at(Tok::Ident)) {
      Token tok = take();
      if (bound_.count(tok.text)) return mkVar(tok.text);
      if (const Term* def = defs_->lookup(tok.text)) return *def;
      if (pendingNames.count(tok.text))
        throw UnknownName("definition '" + tok.text +
                              "' referenced before its own definition",
                          tok.text);
      return mkVar(tok.text);
    }
    if (at(Tok::Hole)) {
      take();
      return mkVar("_");
    }
    if (at(Tok::LParen)) {
      take();
      Term t = term();
      expect(Tok::RParen);
      return t;
    }
    if (at(Tok::LAngle)) {
      take();
      Term t = term();
      expect(Tok::RAngle);
      return mkReset(t);
    }
    take();  // '@'
    std::string a = expect(Tok::Ident).text;
    expect(Tok::LAngle);
    Term t = term();
    expect(Tok::RAngle);
    return mkCtxApp(a, t);
  }

 private:
  void eraseOne(const std::string& x) { bound_.erase(bound_.find(x)); }

  std::vector<Token> toks_;
  const DefsTable* defs_;
  bool allowHole_;
  std::multiset<std::string> bound_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parseTerm(const std::string& text, const DefsTable& defs) {
  Parser p(lex(text), defs, /*allowHole=*/false);
  return p.parseTermTop();
}

DefsTable parseDefs(const std::string& text, const DefsTable& base) {
  auto toks = lex(text);
  // Pre-scan for the names this file defines: an identifier followed by
  // '=' at entry start (start of file or right after ';').
  std::set<std::string> fileNames;
  bool entryStart = true;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (entryStart && toks[i].kind == Tok::Ident && toks[i + 1].kind == Tok::Equals) {
      if (fileNames.count(toks[i].text))
        throw ParseError("duplicate definition of '" + toks[i].text + "'",
                         toks[i].line, toks[i].col, {});
      fileNames.insert(toks[i].text);
    }
    entryStart = toks[i].kind == Tok::Semi;
  }

  DefsTable table = base;
  Parser p(std::move(toks), table, /*allowHole=*/false);
  p.pendingNames = fileNames;
  while (!p.at(Tok::End)) {
    Token name = p.expect(Tok::Ident);
    if (table.lookup(name.text))
      throw ParseError("redefinition of '" + name.text + "'", name.line,
                       name.col, {});
    p.expect(Tok::Equals);
    Term t = p.term();
    p.expect(Tok::Semi);
    p.pendingNames.erase(name.text);
    table.define(name.text, t);
  }
  return table;
}

static std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IllegalInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DefsTable loadDefsFile(const std::string& path, const DefsTable& base) {
  return parseDefs(readFile(path), base);
}

namespace {

bool hasHole(const Term& t) {
  if (is<Var>(t)) return as<Var>(t).name == "_";
  if (is<Lam>(t)) return hasHole(as<Lam>(t).body);
  if (is<Shift>(t)) return hasHole(as<Shift>(t).body);
  if (is<App>(t)) return hasHole(as<App>(t).fun) || hasHole(as<App>(t).arg);
  if (is<Reset>(t)) return hasHole(as<Reset>(t).body);
  return hasHole(as<CtxApp>(t).body);
}

// Collect frames innermost-first along the hole path.
void toCtx(const Term& t, EvalCtx& out) {
  if (is<Var>(t) && as<Var>(t).name == "_") return;
  if (is<App>(t)) {
    const auto& n = as<App>(t);
    bool inFun = hasHole(n.fun), inArg = hasHole(n.arg);
    if (inFun && inArg) throw IllegalInput("context has more than one hole");
    if (inFun) {
      toCtx(n.fun, out);
      out.frames.push_back(AppL{n.arg});
      return;
    }
    if (inArg) {
      if (!isValue(n.fun))
        throw IllegalInput("context hole in argument of a non-value");
      toCtx(n.arg, out);
      out.frames.push_back(AppR{n.fun});
      return;
    }
  }
  if (is<Reset>(t) && hasHole(as<Reset>(t).body)) {
    toCtx(as<Reset>(t).body, out);
    out.frames.push_back(ResetF{});
    return;
  }
  if (is<CtxApp>(t) && hasHole(as<CtxApp>(t).body)) {
    toCtx(as<CtxApp>(t).body, out);
    out.frames.push_back(CtxVarF{as<CtxApp>(t).cvar});
    return;
  }
  if ((is<Lam>(t) && hasHole(as<Lam>(t).body)) ||
      (is<Shift>(t) && hasHole(as<Shift>(t).body)))
    throw IllegalInput("context hole under a binder");
  throw IllegalInput("context is missing its hole");
}

}  // namespace

EvalCtx parseContext(const std::string& text, const DefsTable& defs) {
  Parser p(lex(text), defs, /*allowHole=*/true);
  Term t = p.parseTermTop();
  if (!hasHole(t)) throw IllegalInput("context is missing its hole: " + text);
  EvalCtx ctx;
  toCtx(t, ctx);
  return ctx;
}

PoolSpec parsePool(const std::string& text, const DefsTable& defs) {
  PoolSpec pool;
  enum class Section { None, Values, Contexts } section = Section::None;
  std::string buf;
  std::istringstream in(text);
  std::string lineStr;

  auto flushEntries = [&]() {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= buf.size(); ++i) {
      if (i == buf.size() || buf[i] == ';') {
        std::string entry = buf.substr(start, i - start);
        start = i + 1;
        bool blank = true;
        for (char c : entry)
          if (!std::isspace((unsigned char)c)) { blank = false; break; }
        if (blank) continue;
        if (section == Section::None)
          throw IllegalInput("pool entry outside [values]/[contexts] section");
        if (section == Section::Values) {
          Term v = parseTerm(entry, defs);
          VarSets fv = freeVars(v);
          if (!isValue(v) || !fv.vars.empty() || !fv.ctxVars.empty())
            throw IllegalInput("pool value must be a closed value: " + entry);
          pool.values.push_back(v);
        } else {
          EvalCtx c = parseContext(entry, defs);
          if (!isPureCtx(c))
            throw IllegalInput("pool context must be pure: " + entry);
          VarSets fv = freeVarsCtx(c);
          if (!fv.vars.empty() || !fv.ctxVars.empty())
            throw IllegalInput("pool context must be closed: " + entry);
          pool.contexts.push_back(c);
        }
      }
    }
    buf.clear();
  };

  while (std::getline(in, lineStr)) {
    std::string noComment = lineStr.substr(0, lineStr.find("--"));
    std::string trimmed;
    for (char c : noComment)
      if (!std::isspace((unsigned char)c)) trimmed += c;
    if (trimmed == "[values]") {
      flushEntries();
      section = Section::Values;
      continue;
    }
    if (trimmed == "[contexts]") {
      flushEntries();
      section = Section::Contexts;
      continue;
    }
    buf += noComment;
    buf += '\n';
  }
  flushEntries();
  return pool;
}

PoolSpec loadPoolFile(const std::string& path, const DefsTable& defs) {
  return parsePool(readFile(path), defs);
}

}  // namespace lamshift
