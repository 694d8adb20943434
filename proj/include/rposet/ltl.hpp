#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rposet/prop.hpp"

namespace rposet {

enum class Op { True, Atom, NotAtom, And, Or, Next, Eventually, Until };

/// sc-LTL formula in positive normal form. Immutable value type; copies share
/// structure.
class Formula {
public:
  static Formula truth();
  static Formula atom(PropId p);
  static Formula not_atom(PropId p);
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula next(Formula f);
  static Formula eventually(Formula f);
  static Formula until(Formula lhs, Formula rhs);

  Formula();

  Op op() const;
  PropId prop() const;
  const std::vector<Formula>& children() const;

  /// Node count of the syntax tree.
  std::size_t length() const;

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
public:
  enum class Kind { Syntax, UnknownAtom, NegatedNonAtom };
  ParseError(Kind kind, std::size_t position, const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

private:
  Kind kind_;
  std::size_t position_;
};

/// Strict mode rejects atoms missing from the table; Declare interns them.
enum class AtomPolicy { Strict, Declare };

Formula parse_formula(std::string_view text, PropTable& table,
                      AtomPolicy policy = AtomPolicy::Strict);

/// Fully parenthesized text that parses back to the same tree.
std::string to_string(const Formula& f, const PropTable& table);

/// Finite-trace semantics: an atom needs a current position, F/U quantify over
/// positions inside the word, and the empty word satisfies only `true`.
bool evaluate(const Formula& f, const Word& w);

/// Per-position truth values of `f` on every suffix w[i..], i in [0, |w|].
std::vector<bool> evaluate_suffixes(const Formula& f, const Word& w);

PropSet atoms(const Formula& f);

}  // namespace rposet
