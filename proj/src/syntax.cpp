#include "letrecopt/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace letrecopt {

namespace {

std::vector<VarName> mergeSorted(const std::vector<VarName>& a, const std::vector<VarName>& b) {
  std::vector<VarName> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<VarName> withoutNames(std::vector<VarName> v, const std::vector<VarName>& drop) {
  std::erase_if(v, [&](const VarName& n) {
    return std::find(drop.begin(), drop.end(), n) != drop.end();
  });
  return v;
}

}  // namespace

Node::Node(Data data, std::uint32_t origin) : data_(std::move(data)), origin_(origin), size_(1) {
  std::visit(
      [this](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Var>) {
          free_ = {d.name};
        } else if constexpr (std::is_same_v<T, Abs>) {
          free_ = withoutNames(d.body->freeVars(), {d.binder});
          size_ += d.body->size();
        } else if constexpr (std::is_same_v<T, App>) {
          free_ = mergeSorted(d.fun->freeVars(), d.arg->freeVars());
          size_ += d.fun->size() + d.arg->size();
        } else {
          std::vector<VarName> acc = d.body->freeVars();
          std::vector<VarName> names;
          size_ += d.body->size();
          for (const Def& def : d.defs) {
            acc = mergeSorted(acc, def.body->freeVars());
            names.push_back(def.name);
            size_ += def.body->size();
          }
          free_ = withoutNames(std::move(acc), names);
        }
      },
      data_);
}

bool Node::hasFree(std::string_view name) const {
  return std::binary_search(free_.begin(), free_.end(), name,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

// ---------------------------------------------------------------------------
// Term construction and access

Term Term::var(VarName name, std::uint32_t origin) {
  return Term(std::make_shared<const Node>(Var{std::move(name)}, origin));
}

Term Term::abs(VarName binder, const Term& body, std::uint32_t origin) {
  return Term(std::make_shared<const Node>(Abs{std::move(binder), body.node_}, origin));
}

Term Term::abs(const std::vector<VarName>& binders, const Term& body) {
  Term out = body;
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) out = abs(*it, out);
  return out;
}

Term Term::app(const Term& fun, const Term& arg, std::uint32_t origin) {
  return Term(std::make_shared<const Node>(App{fun.node_, arg.node_}, origin));
}

Term Term::apps(const Term& head, const std::vector<Term>& args) {
  Term out = head;
  for (const Term& a : args) out = app(out, a);
  return out;
}

Term Term::letrec(std::vector<std::pair<VarName, Term>> defs, const Term& body,
                  std::uint32_t origin) {
  Letrec l;
  l.body = body.node_;
  for (auto& [name, def] : defs) l.defs.push_back(Def{std::move(name), def.node_});
  return Term(std::make_shared<const Node>(std::move(l), origin));
}

const VarName& Term::name() const { return std::get<Var>(node_->data()).name; }
const VarName& Term::binder() const { return std::get<Abs>(node_->data()).binder; }

Term Term::body() const {
  if (isAbs()) return Term(std::get<Abs>(node_->data()).body);
  return Term(std::get<Letrec>(node_->data()).body);
}

Term Term::fun() const { return Term(std::get<App>(node_->data()).fun); }
Term Term::arg() const { return Term(std::get<App>(node_->data()).arg); }
std::size_t Term::defCount() const { return std::get<Letrec>(node_->data()).defs.size(); }
const VarName& Term::defName(std::size_t i) const {
  return std::get<Letrec>(node_->data()).defs.at(i).name;
}
Term Term::defBody(std::size_t i) const {
  return Term(std::get<Letrec>(node_->data()).defs.at(i).body);
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.valid() || !b.valid()) return false;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case TermKind::Var:
      return a.name() == b.name();
    case TermKind::Abs:
      return a.binder() == b.binder() && a.body() == b.body();
    case TermKind::App:
      return a.fun() == b.fun() && a.arg() == b.arg();
    case TermKind::Letrec:
      if (a.defCount() != b.defCount()) return false;
      for (std::size_t i = 0; i < a.defCount(); ++i) {
        if (a.defName(i) != b.defName(i) || a.defBody(i) != b.defBody(i)) return false;
      }
      return a.body() == b.body();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Positions

std::string positionToString(const Position& pos) {
  if (pos.empty()) return "root";
  std::string out;
  for (const Step& s : pos) {
    if (!out.empty()) out += '.';
    switch (s.kind) {
      case Step::Kind::Fun: out += "fun"; break;
      case Step::Kind::Arg: out += "arg"; break;
      case Step::Kind::Body: out += "body"; break;
      case Step::Kind::Def: out += "def" + std::to_string(s.index); break;
    }
  }
  return out;
}

Position positionFromString(std::string_view text) {
  Position pos;
  if (text == "root" || text.empty()) return pos;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('.', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view part = text.substr(start, end - start);
    if (part == "fun") {
      pos.push_back(funStep());
    } else if (part == "arg") {
      pos.push_back(argStep());
    } else if (part == "body") {
      pos.push_back(bodyStep());
    } else if (part.starts_with("def") && part.size() > 3) {
      pos.push_back(defStep(static_cast<std::uint32_t>(std::stoul(std::string(part.substr(3))))));
    } else {
      throw std::invalid_argument("bad position selector: " + std::string(part));
    }
    start = end + 1;
  }
  return pos;
}

namespace {

Term child(const Term& t, const Step& s) {
  switch (s.kind) {
    case Step::Kind::Fun:
      if (t.isApp()) return t.fun();
      break;
    case Step::Kind::Arg:
      if (t.isApp()) return t.arg();
      break;
    case Step::Kind::Body:
      if (t.isAbs() || t.isLetrec()) return t.body();
      break;
    case Step::Kind::Def:
      if (t.isLetrec() && s.index < t.defCount()) return t.defBody(s.index);
      break;
  }
  throw std::out_of_range("position does not resolve");
}

Term withChild(const Term& t, const Step& s, const Term& c) {
  switch (s.kind) {
    case Step::Kind::Fun:
      return Term::app(c, t.arg(), t.origin());
    case Step::Kind::Arg:
      return Term::app(t.fun(), c, t.origin());
    case Step::Kind::Body:
      if (t.isAbs()) return Term::abs(t.binder(), c, t.origin());
      [[fallthrough]];
    case Step::Kind::Def: {
      std::vector<std::pair<VarName, Term>> defs;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        bool hit = s.kind == Step::Kind::Def && s.index == i;
        defs.emplace_back(t.defName(i), hit ? c : t.defBody(i));
      }
      return Term::letrec(std::move(defs), s.kind == Step::Kind::Body ? c : t.body(), t.origin());
    }
  }
  throw std::out_of_range("position does not resolve");
}

Term replaceFrom(const Term& t, const Position& pos, std::size_t i, const Term& r) {
  if (i == pos.size()) return r;
  return withChild(t, pos[i], replaceFrom(child(t, pos[i]), pos, i + 1, r));
}

}  // namespace

Term subtermAt(const Term& t, const Position& pos) {
  Term cur = t;
  for (const Step& s : pos) cur = child(cur, s);
  return cur;
}

Term replaceAt(const Term& t, const Position& pos, const Term& replacement) {
  return replaceFrom(t, pos, 0, replacement);
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

bool isValidVarName(std::string_view name) {
  if (name.empty()) return false;
  auto c0 = static_cast<unsigned char>(name[0]);
  if (!(std::isalpha(c0) || c0 == '_')) return false;
  for (char ch : name) {
    auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '\'')) return false;
  }
  return name != "letrec" && name != "in";
}

namespace {

enum class Tok { Lambda, Dot, LParen, RParen, Semi, Eq, Ident, Letrec, In, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Lambda: return "'\\'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Eq: return "'='";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Letrec: return "'letrec'";
    case Tok::In: return "'in'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok{Tok::End, {}, line, col};
    if (c == '\\') {
      tok.kind = Tok::Lambda;
      advance(1);
    } else if (src.substr(i, 2) == "\xCE\xBB") {  // λ
      tok.kind = Tok::Lambda;
      advance(2);
    } else if (c == '.') {
      tok.kind = Tok::Dot;
      advance(1);
    } else if (c == '(') {
      tok.kind = Tok::LParen;
      advance(1);
    } else if (c == ')') {
      tok.kind = Tok::RParen;
      advance(1);
    } else if (c == ';') {
      tok.kind = Tok::Semi;
      advance(1);
    } else if (c == '=') {
      tok.kind = Tok::Eq;
      advance(1);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\'')) {
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      tok.kind = tok.text == "letrec" ? Tok::Letrec : tok.text == "in" ? Tok::In : Tok::Ident;
      advance(j - i);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(tok));
  }
  out.push_back(Token{Tok::End, {}, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Term parseAll() {
    Term t = term();
    if (peek().kind != Tok::End) fail("expected end of input");
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + ", found " + describe(peek()), peek().line, peek().column);
  }

  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    return next();
  }

  Term term() {
    if (peek().kind == Tok::Lambda) {
      next();
      std::vector<VarName> binders;
      while (peek().kind == Tok::Ident) binders.push_back(next().text);
      if (binders.empty()) fail("expected binder after '\\'");
      expect(Tok::Dot, "'.'");
      return Term::abs(binders, term());
    }
    if (peek().kind == Tok::Letrec) {
      next();
      std::vector<std::pair<VarName, Term>> defs;
      NameSet seen;
      do {
        Token name = expect(Tok::Ident, "definition name");
        if (!seen.insert(name.text).second) {
          throw ParseError("duplicate definition name '" + name.text + "' in letrec", name.line,
                           name.column);
        }
        expect(Tok::Eq, "'='");
        Term rhs = term();
        defs.emplace_back(name.text, rhs);
      } while (peek().kind == Tok::Semi && (next(), true));
      expect(Tok::In, "'in'");
      Term body = term();
      return Term::letrec(std::move(defs), body);
    }
    return application();
  }

  bool atAtom() const { return peek().kind == Tok::Ident || peek().kind == Tok::LParen; }

  Term application() {
    if (!atAtom()) fail("expected a term");
    Term t = atom();
    while (atAtom()) t = Term::app(t, atom());
    return t;
  }

  Term atom() {
    if (peek().kind == Tok::Ident) return Term::var(next().text);
    expect(Tok::LParen, "'('");
    Term t = term();
    expect(Tok::RParen, "')'");
    return t;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void printTerm(const Term& t, std::string& out);

void printFun(const Term& t, std::string& out) {
  if (t.isVar() || t.isApp()) {
    printTerm(t, out);
  } else {
    out += '(';
    printTerm(t, out);
    out += ')';
  }
}

void printArg(const Term& t, std::string& out) {
  if (t.isVar()) {
    out += t.name();
  } else {
    out += '(';
    printTerm(t, out);
    out += ')';
  }
}

void printTerm(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out += t.name();
      return;
    case TermKind::Abs: {
      out += '\\';
      Term cur = t;
      bool first = true;
      while (cur.isAbs()) {
        if (!first) out += ' ';
        out += cur.binder();
        first = false;
        cur = cur.body();
      }
      out += ". ";
      printTerm(cur, out);
      return;
    }
    case TermKind::App:
      printFun(t.fun(), out);
      out += ' ';
      printArg(t.arg(), out);
      return;
    case TermKind::Letrec:
      out += "letrec ";
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        if (i > 0) out += "; ";
        out += t.defName(i);
        out += " = ";
        printTerm(t.defBody(i), out);
      }
      out += " in ";
      printTerm(t.body(), out);
      return;
  }
}

}  // namespace

Term parse(std::string_view text) { return Parser(tokenize(text)).parseAll(); }

std::string print(const Term& t) {
  std::string out;
  printTerm(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Naming

NameSet freeVars(const Term& t) {
  return NameSet(t.freeVarList().begin(), t.freeVarList().end());
}

namespace {

void collectNames(const Term& t, NameSet& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out.insert(t.name());
      return;
    case TermKind::Abs:
      out.insert(t.binder());
      collectNames(t.body(), out);
      return;
    case TermKind::App:
      collectNames(t.fun(), out);
      collectNames(t.arg(), out);
      return;
    case TermKind::Letrec:
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        out.insert(t.defName(i));
        collectNames(t.defBody(i), out);
      }
      collectNames(t.body(), out);
      return;
  }
}

}  // namespace

NameSet allNames(const Term& t) {
  NameSet out;
  collectNames(t, out);
  return out;
}

VarName freshName(const VarName& base, const NameSet& avoid) {
  for (std::size_t i = 1;; ++i) {
    VarName candidate = base + std::to_string(i);
    if (!avoid.contains(candidate)) return candidate;
  }
}

namespace {

using Subst = std::map<VarName, Term>;

bool touches(const Term& t, const Subst& s) {
  for (const auto& [k, v] : s) {
    if (t.hasFree(k)) return true;
  }
  return false;
}

// Free variables of the substituted values whose keys actually occur in t.
NameSet incomingFree(const Term& t, const Subst& s) {
  NameSet out;
  for (const auto& [k, v] : s) {
    if (t.hasFree(k)) out.insert(v.freeVarList().begin(), v.freeVarList().end());
  }
  return out;
}

Term substRec(const Term& t, const Subst& s) {
  if (!touches(t, s)) return t;
  switch (t.kind()) {
    case TermKind::Var:
      return s.at(t.name());
    case TermKind::App:
      return Term::app(substRec(t.fun(), s), substRec(t.arg(), s), t.origin());
    case TermKind::Abs: {
      Subst inner = s;
      inner.erase(t.binder());
      Term body = t.body();
      if (!touches(body, inner)) return t;
      NameSet incoming = incomingFree(body, inner);
      VarName binder = t.binder();
      if (incoming.contains(binder)) {
        NameSet avoid = incoming;
        avoid.insert(body.freeVarList().begin(), body.freeVarList().end());
        for (const auto& [k, v] : inner) avoid.insert(k);
        VarName renamed = freshName(binder, avoid);
        inner[binder] = Term::var(renamed);
        binder = renamed;
      }
      return Term::abs(binder, substRec(body, inner), t.origin());
    }
    case TermKind::Letrec: {
      Subst inner = s;
      NameSet names;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        inner.erase(t.defName(i));
        names.insert(t.defName(i));
      }
      NameSet incoming;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        NameSet part = incomingFree(t.defBody(i), inner);
        incoming.insert(part.begin(), part.end());
      }
      NameSet part = incomingFree(t.body(), inner);
      incoming.insert(part.begin(), part.end());
      if (incoming.empty() && !touches(t.body(), inner)) {
        bool any = false;
        for (std::size_t i = 0; i < t.defCount(); ++i) any = any || touches(t.defBody(i), inner);
        if (!any) return t;
      }
      NameSet avoid = incoming;
      avoid.insert(names.begin(), names.end());
      avoid.insert(t.freeVarList().begin(), t.freeVarList().end());
      for (const auto& [k, v] : inner) avoid.insert(k);
      std::vector<VarName> newNames;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        VarName n = t.defName(i);
        if (incoming.contains(n)) {
          VarName renamed = freshName(n, avoid);
          avoid.insert(renamed);
          inner[n] = Term::var(renamed);
          n = renamed;
        }
        newNames.push_back(n);
      }
      std::vector<std::pair<VarName, Term>> defs;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        defs.emplace_back(newNames[i], substRec(t.defBody(i), inner));
      }
      return Term::letrec(std::move(defs), substRec(t.body(), inner), t.origin());
    }
  }
  return t;
}

}  // namespace

Term substitute(const Term& t, const VarName& x, const Term& d) {
  return substRec(t, Subst{{x, d}});
}

Term substituteMany(const Term& t, const std::map<VarName, Term>& subst) {
  return substRec(t, subst);
}

namespace {

class Distinguisher {
 public:
  explicit Distinguisher(const Term& t) : used_(freeVars(t)) {}

  Term go(const Term& t, const std::map<VarName, VarName>& env) {
    switch (t.kind()) {
      case TermKind::Var: {
        auto it = env.find(t.name());
        if (it == env.end() || it->second == t.name()) return t;
        return Term::var(it->second, t.origin());
      }
      case TermKind::Abs: {
        VarName b = claim(t.binder());
        auto inner = env;
        inner[t.binder()] = b;
        Term body = go(t.body(), inner);
        if (b == t.binder() && body.sameNode(t.body())) return t;
        return Term::abs(b, body, t.origin());
      }
      case TermKind::App: {
        Term f = go(t.fun(), env);
        Term a = go(t.arg(), env);
        if (f.sameNode(t.fun()) && a.sameNode(t.arg())) return t;
        return Term::app(f, a, t.origin());
      }
      case TermKind::Letrec: {
        auto inner = env;
        std::vector<VarName> names;
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          names.push_back(claim(t.defName(i)));
          inner[t.defName(i)] = names.back();
        }
        std::vector<std::pair<VarName, Term>> defs;
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          defs.emplace_back(names[i], go(t.defBody(i), inner));
        }
        return Term::letrec(std::move(defs), go(t.body(), inner), t.origin());
      }
    }
    return t;
  }

 private:
  VarName claim(const VarName& name) {
    VarName n = used_.contains(name) ? freshName(name, used_) : name;
    used_.insert(n);
    return n;
  }

  NameSet used_;
};

bool collectBinders(const Term& t, NameSet& seen) {
  switch (t.kind()) {
    case TermKind::Var:
      return true;
    case TermKind::Abs:
      return seen.insert(t.binder()).second && collectBinders(t.body(), seen);
    case TermKind::App:
      return collectBinders(t.fun(), seen) && collectBinders(t.arg(), seen);
    case TermKind::Letrec:
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        if (!seen.insert(t.defName(i)).second) return false;
      }
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        if (!collectBinders(t.defBody(i), seen)) return false;
      }
      return collectBinders(t.body(), seen);
  }
  return true;
}

}  // namespace

Term ensureDistinctlyBound(const Term& t) { return Distinguisher(t).go(t, {}); }

bool isDistinctlyBound(const Term& t) {
  NameSet seen(t.freeVarList().begin(), t.freeVarList().end());
  return collectBinders(t, seen);
}

namespace {

using Levels = std::map<VarName, std::size_t>;

bool alphaRec(const Term& a, const Term& b, const Levels& la, const Levels& lb, std::size_t depth) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Var: {
      auto ia = la.find(a.name());
      auto ib = lb.find(b.name());
      if (ia == la.end() || ib == lb.end()) return ia == la.end() && ib == lb.end() && a.name() == b.name();
      return ia->second == ib->second;
    }
    case TermKind::Abs: {
      Levels na = la;
      Levels nb = lb;
      na[a.binder()] = depth;
      nb[b.binder()] = depth;
      return alphaRec(a.body(), b.body(), na, nb, depth + 1);
    }
    case TermKind::App:
      return alphaRec(a.fun(), b.fun(), la, lb, depth) && alphaRec(a.arg(), b.arg(), la, lb, depth);
    case TermKind::Letrec: {
      if (a.defCount() != b.defCount()) return false;
      Levels na = la;
      Levels nb = lb;
      for (std::size_t i = 0; i < a.defCount(); ++i) {
        na[a.defName(i)] = depth + i;
        nb[b.defName(i)] = depth + i;
      }
      std::size_t next = depth + a.defCount();
      for (std::size_t i = 0; i < a.defCount(); ++i) {
        if (!alphaRec(a.defBody(i), b.defBody(i), na, nb, next)) return false;
      }
      return alphaRec(a.body(), b.body(), na, nb, next);
    }
  }
  return false;
}

}  // namespace

bool alphaEq(const Term& a, const Term& b) { return alphaRec(a, b, {}, {}, 0); }

// ---------------------------------------------------------------------------
// Helpers

Spine unwindSpine(const Term& t) {
  Spine s;
  Term cur = t;
  while (cur.isApp()) {
    s.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = cur;
  return s;
}

std::pair<std::vector<VarName>, Term> peelAbs(const Term& t) {
  std::vector<VarName> binders;
  Term cur = t;
  while (cur.isAbs()) {
    binders.push_back(cur.binder());
    cur = cur.body();
  }
  return {binders, cur};
}

namespace {

Term tagRec(const Term& t, Position& pos, std::vector<Position>& table) {
  table.push_back(pos);
  auto id = static_cast<std::uint32_t>(table.size());
  auto sub = [&](const Term& c, Step s) {
    pos.push_back(s);
    Term r = tagRec(c, pos, table);
    pos.pop_back();
    return r;
  };
  switch (t.kind()) {
    case TermKind::Var:
      return Term::var(t.name(), id);
    case TermKind::Abs:
      return Term::abs(t.binder(), sub(t.body(), bodyStep()), id);
    case TermKind::App: {
      Term f = sub(t.fun(), funStep());
      Term a = sub(t.arg(), argStep());
      return Term::app(f, a, id);
    }
    case TermKind::Letrec: {
      std::vector<std::pair<VarName, Term>> defs;
      for (std::size_t i = 0; i < t.defCount(); ++i) {
        defs.emplace_back(t.defName(i), sub(t.defBody(i), defStep(static_cast<std::uint32_t>(i))));
      }
      Term body = sub(t.body(), bodyStep());
      return Term::letrec(std::move(defs), body, id);
    }
  }
  return t;
}

}  // namespace

std::pair<Term, std::vector<Position>> tagOrigins(const Term& t) {
  std::vector<Position> table;
  Position pos;
  Term tagged = tagRec(t, pos, table);
  return {tagged, table};
}

}  // namespace letrecopt
