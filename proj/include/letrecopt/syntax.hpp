#pragma once

// λ-letrec terms: representation, parsing, printing, and the naming
// operations (free variables, capture-avoiding substitution, α-equivalence,
// distinct binding) everything else is built on.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace letrecopt {

using VarName = std::string;
using NameSet = std::set<VarName>;

class Term;

struct Var {
  VarName name;
};

struct Abs {
  VarName binder;
  std::shared_ptr<const class Node> body;
};

struct App {
  std::shared_ptr<const class Node> fun;
  std::shared_ptr<const class Node> arg;
};

struct Def {
  VarName name;
  std::shared_ptr<const class Node> body;
};

struct Letrec {
  std::vector<Def> defs;
  std::shared_ptr<const class Node> body;
};

enum class TermKind { Var, Abs, App, Letrec };

/// Immutable term node. Free variables are computed once at construction and
/// kept sorted, so membership tests during substitution are logarithmic.
class Node {
 public:
  using Data = std::variant<Var, Abs, App, Letrec>;

  Node(Data data, std::uint32_t origin);

  const Data& data() const { return data_; }
  const std::vector<VarName>& freeVars() const { return free_; }
  bool hasFree(std::string_view name) const;
  std::uint32_t origin() const { return origin_; }
  std::size_t size() const { return size_; }

 private:
  Data data_;
  std::vector<VarName> free_;
  std::uint32_t origin_;
  std::size_t size_;
};

/// Value handle over a shared immutable node. Copying is cheap; subterms are
/// shared structurally between a term and the terms derived from it.
///
/// `origin` is an optional provenance tag (0 = none) that survives copying
/// through substitution and unfolding; it never takes part in equality.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Term var(VarName name, std::uint32_t origin = 0);
  static Term abs(VarName binder, const Term& body, std::uint32_t origin = 0);
  /// Nested abstractions: abs({x, y}, b) is λx.λy.b.
  static Term abs(const std::vector<VarName>& binders, const Term& body);
  static Term app(const Term& fun, const Term& arg, std::uint32_t origin = 0);
  /// Left-nested application spine.
  static Term apps(const Term& head, const std::vector<Term>& args);
  static Term letrec(std::vector<std::pair<VarName, Term>> defs, const Term& body,
                     std::uint32_t origin = 0);

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const { return static_cast<TermKind>(node_->data().index()); }
  bool isVar() const { return kind() == TermKind::Var; }
  bool isAbs() const { return kind() == TermKind::Abs; }
  bool isApp() const { return kind() == TermKind::App; }
  bool isLetrec() const { return kind() == TermKind::Letrec; }

  const VarName& name() const;      // Var
  const VarName& binder() const;    // Abs
  Term body() const;                // Abs, Letrec
  Term fun() const;                 // App
  Term arg() const;                 // App
  std::size_t defCount() const;     // Letrec
  const VarName& defName(std::size_t i) const;
  Term defBody(std::size_t i) const;

  const std::vector<VarName>& freeVarList() const { return node_->freeVars(); }
  bool hasFree(std::string_view name) const { return node_->hasFree(name); }
  std::uint32_t origin() const { return node_->origin(); }
  std::size_t size() const { return node_->size(); }

  const std::shared_ptr<const Node>& node() const { return node_; }
  bool sameNode(const Term& other) const { return node_ == other.node_; }

  /// Structural equality (names compared literally, origins ignored).
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Positions

struct Step {
  enum class Kind : std::uint8_t { Fun, Arg, Body, Def };
  Kind kind;
  std::uint32_t index = 0;  // only meaningful for Def

  friend auto operator<=>(const Step&, const Step&) = default;
};

using Position = std::vector<Step>;

inline Step funStep() { return {Step::Kind::Fun, 0}; }
inline Step argStep() { return {Step::Kind::Arg, 0}; }
inline Step bodyStep() { return {Step::Kind::Body, 0}; }
inline Step defStep(std::uint32_t i) { return {Step::Kind::Def, i}; }

/// "root" for the empty path, otherwise dot-separated selectors such as
/// "body.def0.fun.arg".
std::string positionToString(const Position& pos);
Position positionFromString(std::string_view text);

/// Throws std::out_of_range when the path does not resolve.
Term subtermAt(const Term& t, const Position& pos);
Term replaceAt(const Term& t, const Position& pos, const Term& replacement);

// ---------------------------------------------------------------------------
// Text

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

Term parse(std::string_view text);
std::string print(const Term& t);

bool isValidVarName(std::string_view name);

// ---------------------------------------------------------------------------
// Naming

NameSet freeVars(const Term& t);
/// Every name occurring in t, bound or free.
NameSet allNames(const Term& t);

/// `base` followed by the smallest positive index not in `avoid`.
VarName freshName(const VarName& base, const NameSet& avoid);

Term substitute(const Term& t, const VarName& x, const Term& d);
/// Simultaneous capture-avoiding substitution.
Term substituteMany(const Term& t, const std::map<VarName, Term>& subst);

/// α-equivalent term in which every binder (abstraction or letrec
/// definition) binds a distinct name that is also distinct from every free
/// name. Renaming is leftmost-outermost with numeric suffixes.
Term ensureDistinctlyBound(const Term& t);
bool isDistinctlyBound(const Term& t);

bool alphaEq(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// Small structural helpers shared by the analyses

struct Spine {
  Term head;
  std::vector<Term> args;
};

Spine unwindSpine(const Term& t);

/// Peels leading abstractions: λx₁…λxₙ.B -> ({x₁…xₙ}, B).
std::pair<std::vector<VarName>, Term> peelAbs(const Term& t);

/// Tags every node with its pre-order index (starting at 1) and returns the
/// tagged term together with the position of each tag.
std::pair<Term, std::vector<Position>> tagOrigins(const Term& t);

}  // namespace letrecopt
