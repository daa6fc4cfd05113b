#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyalign/value.hpp"

namespace fuzzyalign {

struct VariableDecl;

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

const char* to_string(CmpOp op);
CmpOp negate(CmpOp op);
bool is_inequality(CmpOp op);

/// An atomic comparison `variable cmp constant`. A primed variable (`Amount'`)
/// reads the value written by the firing itself.
struct Predicate {
  std::string variable;
  bool primed = false;
  CmpOp op = CmpOp::Eq;
  Value constant;

  /// Canonical text, e.g. `Amount >= 10000`. Used as the key for attached MFs.
  std::string text() const;
  bool holds(const Value& value) const;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Boolean formula over atomic predicates. Immutable after parsing.
struct GuardExpr {
  enum class Kind { Atom, Not, And, Or };

  Kind kind = Kind::Atom;
  Predicate atom;                  // Kind::Atom
  std::vector<GuardExpr> operands; // Not: 1, And/Or: 2
  /// Canonical text of the atom as written; kept through NNF conversion so that
  /// negated leaves still find the MF attached to their source predicate.
  std::string source;

  static GuardExpr make_atom(Predicate p);
  static GuardExpr make_not(GuardExpr operand);
  static GuardExpr make_binary(Kind kind, GuardExpr lhs, GuardExpr rhs);

  std::string text() const;
  /// Leaves in left-to-right order.
  std::vector<Predicate> atoms() const;
};

/// Grammar: or := and ("OR" and)*; and := not ("AND" not)*;
/// not := "NOT" not | "(" expr ")" | ident["'"] cmp literal.
/// Throws Error{Syntax} with a column, Error{Semantic} for unknown variables or
/// out-of-domain constants, Error{TypeMismatch} for ordered comparison of strings.
GuardExpr parse_guard(std::string_view text, std::span<const VariableDecl> vars);

/// Parses a single atomic predicate (used for MF keys).
Predicate parse_predicate(std::string_view text, std::span<const VariableDecl> vars);

/// Returns the value for a predicate's variable, or nullptr when undefined.
using ValueLookup = std::function<const Value*(const Predicate&)>;

/// Throws Error{UndefinedVariable} if a referenced variable is undefined.
bool eval_guard(const GuardExpr& g, const ValueLookup& lookup);
bool eval_guard(const GuardExpr& g, const std::map<std::string, Value>& values);

/// Negation-normal form: NOT only ever applied by flipping a leaf comparison.
GuardExpr to_nnf(const GuardExpr& g);

}  // namespace fuzzyalign
