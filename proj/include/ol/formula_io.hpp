#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ol/formula.hpp"

namespace ol {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// An inequality `lhs <= rhs`, written `lhs |- rhs` in text.
struct Inequality {
  FormulaId lhs;
  FormulaId rhs;
};

/// Reads s-expression formulas:
///
///   f ::= atom | true | false | (not f) | (and f ...) | (or f ...)
///
/// n-ary and/or fold left-associatively. `;` starts a comment that runs to the
/// end of the line. The token `|-` separates the two sides of an inequality.
class FormulaReader {
 public:
  FormulaReader(FormulaStore& store, std::string_view text);

  FormulaId formula();
  Inequality inequality();
  bool at_end();
  /// Throws ParseError at the next token unless the input is exhausted.
  void expect_end(const char* what);

 private:
  enum class Tok { LParen, RParen, Atom, Turnstile, End };
  struct Token {
    Tok kind;
    std::string_view text;
    std::size_t line;
    std::size_t column;
  };

  Token peek();
  Token next();
  [[noreturn]] void fail(const Token& at, const std::string& what) const;

  FormulaStore& store_;
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::vector<Token> lookahead_;
};

/// Parses exactly one formula.
FormulaId parse_formula(FormulaStore& store, std::string_view text);

/// Parses `lhs |- rhs`.
Inequality parse_goal(FormulaStore& store, std::string_view text);

/// Parses a (possibly empty) sequence of `lhs |- rhs` inequalities.
std::vector<Inequality> parse_axioms(FormulaStore& store, std::string_view text);

/// Canonical s-expression. Prints the tree unfolding of the DAG.
std::string to_sexpr(const FormulaStore& store, FormulaId f);

}  // namespace ol
