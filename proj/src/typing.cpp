#include "letrecopt/typing.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace letrecopt {

BareType BareType::base(std::string name) {
  BareType t;
  t.name_ = std::move(name);
  return t;
}

BareType BareType::arrow(BareType from, BareType to) {
  BareType t;
  t.from_ = std::make_shared<const BareType>(std::move(from));
  t.to_ = std::make_shared<const BareType>(std::move(to));
  return t;
}

std::size_t BareType::arity() const {
  std::size_t n = 0;
  for (const BareType* t = this; t->isArrow(); t = &t->to()) ++n;
  return n;
}

bool operator==(const BareType& a, const BareType& b) {
  if (a.isArrow() != b.isArrow()) return false;
  if (a.isBase()) return a.name_ == b.name_;
  return a.from() == b.from() && a.to() == b.to();
}

std::string printType(const BareType& t) {
  if (t.isBase()) return t.baseName();
  std::string lhs = printType(t.from());
  if (t.from().isArrow()) lhs = "(" + lhs + ")";
  return lhs + " -> " + printType(t.to());
}

namespace {

class TypeParser {
 public:
  TypeParser(std::string_view text, int line) : text_(text), line_(line) {}

  BareType parseAll() {
    BareType t = parseArrow();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  BareType parseArrow() {
    BareType lhs = parseAtom();
    skip();
    if (text_.substr(pos_, 2) == "->") {
      pos_ += 2;
      return BareType::arrow(lhs, parseArrow());
    }
    return lhs;
  }

  BareType parseAtom() {
    skip();
    if (pos_ >= text_.size()) fail("expected a type");
    if (text_[pos_] == '(') {
      ++pos_;
      BareType t = parseArrow();
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return t;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a type");
    std::string name(text_.substr(start, pos_ - start));
    if (name != "i") fail("unknown base type '" + name + "'");
    return BareType::base(name);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

// Union-find over type terms.
class Unifier {
 public:
  using Id = std::size_t;

  Id fresh() {
    cells_.push_back({Cell::Kind::Var, {}, 0, 0, cells_.size()});
    return cells_.size() - 1;
  }

  Id baseOf(const std::string& name) {
    cells_.push_back({Cell::Kind::Base, name, 0, 0, cells_.size()});
    return cells_.size() - 1;
  }

  Id arrow(Id a, Id b) {
    cells_.push_back({Cell::Kind::Arrow, {}, a, b, cells_.size()});
    return cells_.size() - 1;
  }

  Id fromBare(const BareType& t) {
    if (t.isBase()) return baseOf(t.baseName());
    Id a = fromBare(t.from());
    return arrow(a, fromBare(t.to()));
  }

  Id find(Id x) {
    while (cells_[x].parent != x) {
      cells_[x].parent = cells_[cells_[x].parent].parent;
      x = cells_[x].parent;
    }
    return x;
  }

  /// Empty string on success, otherwise a reason.
  std::string unify(Id a, Id b) {
    a = find(a);
    b = find(b);
    if (a == b) return {};
    Cell& ca = cells_[a];
    Cell& cb = cells_[b];
    if (ca.kind == Cell::Kind::Var) return bind(a, b);
    if (cb.kind == Cell::Kind::Var) return bind(b, a);
    if (ca.kind == Cell::Kind::Base && cb.kind == Cell::Kind::Base) {
      return ca.name == cb.name ? std::string() : "base types " + ca.name + " and " + cb.name + " differ";
    }
    if (ca.kind != cb.kind) return "cannot unify a base type with a function type";
    Id af = ca.from, at = ca.to, bf = cb.from, bt = cb.to;
    if (auto e = unify(af, bf); !e.empty()) return e;
    if (auto e = unify(at, bt); !e.empty()) return e;
    a = find(a);
    b = find(b);
    if (a != b) cells_[a].parent = b;
    return {};
  }

  BareType resolve(Id x) {
    x = find(x);
    const Cell& c = cells_[x];
    switch (c.kind) {
      case Cell::Kind::Var: return BareType::base("i");
      case Cell::Kind::Base: return BareType::base(c.name);
      case Cell::Kind::Arrow: {
        Id f = c.from, t = c.to;
        BareType from = resolve(f);
        return BareType::arrow(from, resolve(t));
      }
    }
    return BareType::base("i");
  }

 private:
  struct Cell {
    enum class Kind { Var, Base, Arrow } kind;
    std::string name;
    Id from;
    Id to;
    Id parent;
  };

  bool occurs(Id v, Id t) {
    t = find(t);
    if (t == v) return true;
    if (cells_[t].kind != Cell::Kind::Arrow) return false;
    Id f = cells_[t].from, to = cells_[t].to;
    return occurs(v, f) || occurs(v, to);
  }

  std::string bind(Id v, Id t) {
    if (occurs(v, t)) return "occurs check failed";
    cells_[v].parent = t;
    return {};
  }

  std::vector<Cell> cells_;
};

class Inference {
 public:
  explicit Inference(Unifier& u) : u_(u) {}

  Unifier::Id infer(const Term& t, Position& pos) {
    Unifier::Id result = 0;
    switch (t.kind()) {
      case TermKind::Var: {
        auto it = scope_.find(t.name());
        if (it != scope_.end() && !it->second.empty()) {
          result = it->second.back();
        } else {
          auto f = free_.find(t.name());
          if (f == free_.end()) f = free_.emplace(t.name(), u_.fresh()).first;
          result = f->second;
        }
        break;
      }
      case TermKind::Abs: {
        Unifier::Id param = u_.fresh();
        binders_[t.binder()] = param;
        scope_[t.binder()].push_back(param);
        pos.push_back(bodyStep());
        Unifier::Id body = infer(t.body(), pos);
        pos.pop_back();
        scope_[t.binder()].pop_back();
        result = u_.arrow(param, body);
        break;
      }
      case TermKind::App: {
        pos.push_back(funStep());
        Unifier::Id f = infer(t.fun(), pos);
        pos.back() = argStep();
        Unifier::Id a = infer(t.arg(), pos);
        pos.pop_back();
        result = u_.fresh();
        if (auto e = u_.unify(f, u_.arrow(a, result)); !e.empty()) {
          throw TypeError("untypable: " + e + " at " + positionToString(pos));
        }
        break;
      }
      case TermKind::Letrec: {
        std::vector<Unifier::Id> ids;
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          ids.push_back(u_.fresh());
          binders_[t.defName(i)] = ids.back();
          scope_[t.defName(i)].push_back(ids.back());
        }
        for (std::size_t i = 0; i < t.defCount(); ++i) {
          pos.push_back(defStep(static_cast<std::uint32_t>(i)));
          Unifier::Id d = infer(t.defBody(i), pos);
          pos.pop_back();
          if (auto e = u_.unify(ids[i], d); !e.empty()) {
            throw TypeError("untypable: " + e + " in definition of " + t.defName(i));
          }
        }
        pos.push_back(bodyStep());
        result = infer(t.body(), pos);
        pos.pop_back();
        for (std::size_t i = 0; i < t.defCount(); ++i) scope_[t.defName(i)].pop_back();
        break;
      }
    }
    at_.emplace_back(pos, result);
    return result;
  }

  std::map<VarName, Unifier::Id> free_;
  std::map<VarName, Unifier::Id> binders_;
  std::vector<std::pair<Position, Unifier::Id>> at_;

 private:
  Unifier& u_;
  std::map<VarName, std::vector<Unifier::Id>> scope_;
};

}  // namespace

BareType parseType(std::string_view text) { return TypeParser(text, 1).parseAll(); }

TypeEnv parseSignature(std::string_view text) {
  TypeEnv env;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto c = line.find("--"); c != std::string::npos) line.erase(c);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'name : type'", lineNo, 1);
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (!isValidVarName(name)) throw ParseError("invalid name '" + name + "'", lineNo, 1);
    if (env.contains(name)) throw ParseError("duplicate signature for '" + name + "'", lineNo, 1);
    env.emplace(name, TypeParser(std::string_view(line).substr(colon + 1), lineNo).parseAll());
  }
  return env;
}

TypedTerm inferTypes(const Term& t, const TypeEnv& sig) {
  Unifier u;
  Inference inf(u);
  Position pos;
  inf.infer(t, pos);
  // The term alone is typable; anything failing from here on is the
  // signature's fault.
  for (const auto& [name, id] : inf.free_) {
    auto s = sig.find(name);
    if (s == sig.end()) continue;
    if (auto e = u.unify(id, u.fromBare(s->second)); !e.empty()) {
      throw TypeError("signature mismatch: " + name + " : " + printType(s->second) + " (" + e + ")");
    }
  }
  TypedTerm out;
  out.term = t;
  for (const auto& [p, id] : inf.at_) out.types.emplace(p, u.resolve(id));
  for (const auto& [name, id] : inf.binders_) out.binders.emplace(name, u.resolve(id));
  for (const auto& [name, id] : inf.free_) out.freeVars.emplace(name, u.resolve(id));
  return out;
}

bool isTypable(const Term& t, const TypeEnv& sig) {
  try {
    inferTypes(t, sig);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace letrecopt
