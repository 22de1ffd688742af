#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyperlearn/error.hpp"

namespace hyperlearn {

enum class QuantKind { Forall, Exists };

struct TraceVar {
  std::string name;
  int index = 0;  // 1-based position in the quantifier prefix

  bool operator==(const TraceVar&) const = default;
};

struct Quantifier {
  QuantKind kind = QuantKind::Forall;
  TraceVar var;

  bool operator==(const Quantifier&) const = default;
};

/// What an atom reads from: a quantified trace, or (after Skolemization) the
/// trace produced by the Skolem function of an existential quantifier. In
/// both cases `index` is the original 1-based quantifier position, 0 when the
/// name could not be resolved.
enum class TargetKind { Trace, Skolem };

struct TraceRef {
  TargetKind kind = TargetKind::Trace;
  std::string name;
  int index = 0;

  bool operator==(const TraceRef&) const = default;
};

enum class Comparator { LT, GT, EQ };

struct BoolProp {
  std::string prop;
  TraceRef trace;

  bool operator==(const BoolProp&) const = default;
};

/// `[ v@a < c ]`, `[ v@a - v@b > c ]`, `[ |v@a - v@b| < c ]`, `[ v@a = c ]`.
struct Predicate {
  std::string valuation;
  std::vector<TraceRef> args;
  Comparator comparator = Comparator::LT;
  double constant = 0.0;
  bool abs_diff = false;

  bool operator==(const Predicate&) const = default;
};

using Atom = std::variant<BoolProp, Predicate>;

enum class Op { True, False, Atom, Not, And, Or, Implies, Next, Eventually, Always, Until };

struct LtlNode {
  Op op = Op::True;
  Atom atom;                      // meaningful only when op == Op::Atom
  std::vector<LtlNode> children;  // 0, 1 or 2 depending on op

  bool operator==(const LtlNode&) const = default;

  static LtlNode constant(bool value);
  static LtlNode make_atom(Atom a);
  static LtlNode unary(Op op, LtlNode child);
  static LtlNode binary(Op op, LtlNode lhs, LtlNode rhs);
};

struct Formula {
  std::vector<Quantifier> prefix;
  LtlNode body;

  bool operator==(const Formula&) const = default;

  std::size_t arity() const { return prefix.size(); }
};

struct Diagnostic {
  ErrorKind kind;
  std::string message;
};

bool is_unary(Op op);
bool is_binary(Op op);
bool is_temporal(Op op);

/// Parses concrete syntax and resolves trace variables, without checking
/// closedness. Throws SyntaxError only.
Formula parse_formula_unchecked(std::string_view text);

/// parse_formula_unchecked followed by validate; the first diagnostic is
/// rethrown as an Error of the matching kind.
Formula parse_formula(std::string_view text);

/// Empty iff the formula is closed, prefix names are unique and atom arities
/// are respected.
std::vector<Diagnostic> validate(const Formula& f);

std::string unparse(const Formula& f);
std::string unparse(const LtlNode& node);

std::string read_text_file(const std::filesystem::path& path);
Formula load_formula_file(const std::filesystem::path& path);

std::size_t count_atoms(const LtlNode& node);
std::size_t depth(const LtlNode& node);

/// True when every atom is Boolean-valued in robustness terms (propositions
/// and `=` predicates), so robustness only takes the two saturation values.
bool is_boolean_only(const LtlNode& node);

template <class Fn>
void for_each_atom(const LtlNode& node, Fn&& fn) {
  if (node.op == Op::Atom) {
    fn(node.atom);
    return;
  }
  for (const auto& c : node.children) for_each_atom(c, fn);
}

template <class Fn>
void for_each_atom(LtlNode& node, Fn&& fn) {
  if (node.op == Op::Atom) {
    fn(node.atom);
    return;
  }
  for (auto& c : node.children) for_each_atom(c, fn);
}

}  // namespace hyperlearn
