#pragma once

// Simple type inference for λ-letrec with monomorphic recursion.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "letrecopt/syntax.hpp"

namespace letrecopt {

class BareType {
 public:
  static BareType base(std::string name = "i");
  static BareType arrow(BareType from, BareType to);

  bool isBase() const { return !from_; }
  bool isArrow() const { return static_cast<bool>(from_); }
  const std::string& baseName() const { return name_; }
  const BareType& from() const { return *from_; }
  const BareType& to() const { return *to_; }

  /// Number of arrows along the result spine.
  std::size_t arity() const;

  friend bool operator==(const BareType& a, const BareType& b);

 private:
  std::string name_;
  std::shared_ptr<const BareType> from_;
  std::shared_ptr<const BareType> to_;
};

/// "i", "i -> i", "(i -> i) -> i"; arrows associate to the right.
std::string printType(const BareType& t);
BareType parseType(std::string_view text);

using TypeEnv = std::map<VarName, BareType>;

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `.sig` text: one `name : type` per line, blank lines and `--` comments
/// allowed. Throws ParseError.
TypeEnv parseSignature(std::string_view text);

struct TypedTerm {
  Term term;
  std::map<Position, BareType> types;
  /// Type of every binder: abstraction parameters and letrec names.
  TypeEnv binders;
  /// Types assigned to free variables (from the signature or inferred).
  TypeEnv freeVars;

  const BareType& typeAt(const Position& p) const { return types.at(p); }
  const BareType& rootType() const { return types.at({}); }
};

/// Requires a distinctly bound term. Throws TypeError("untypable: …") on an
/// occurs-check or clash failure and TypeError("signature mismatch: …") when
/// the signature contradicts the term.
TypedTerm inferTypes(const Term& t, const TypeEnv& sig = {});

bool isTypable(const Term& t, const TypeEnv& sig = {});

}  // namespace letrecopt
