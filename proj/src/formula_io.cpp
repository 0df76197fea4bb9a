#include "ol/formula_io.hpp"

#include <cctype>

namespace ol {

namespace {

bool atom_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool atom_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

FormulaReader::FormulaReader(FormulaStore& store, std::string_view text) : store_(store), text_(text) {}

void FormulaReader::fail(const Token& at, const std::string& what) const { throw ParseError(what, at.line, at.column); }

FormulaReader::Token FormulaReader::next() {
  if (!lookahead_.empty()) {
    auto t = lookahead_.back();
    lookahead_.pop_back();
    return t;
  }
  auto advance = [&] {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  };
  for (;;) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    if (pos_ < text_.size() && text_[pos_] == ';') {
      while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      continue;
    }
    break;
  }
  Token t{Tok::End, {}, line_, column_};
  if (pos_ >= text_.size()) return t;
  const std::size_t start = pos_;
  const char c = text_[pos_];
  if (c == '(' || c == ')') {
    t.kind = c == '(' ? Tok::LParen : Tok::RParen;
    advance();
  } else if (c == '|' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
    t.kind = Tok::Turnstile;
    advance();
    advance();
  } else if (atom_start(c)) {
    t.kind = Tok::Atom;
    while (pos_ < text_.size() && atom_char(text_[pos_])) advance();
  } else {
    throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
  }
  t.text = text_.substr(start, pos_ - start);
  return t;
}

FormulaReader::Token FormulaReader::peek() {
  if (lookahead_.empty()) lookahead_.push_back(next());
  return lookahead_.back();
}

bool FormulaReader::at_end() { return peek().kind == Tok::End; }

void FormulaReader::expect_end(const char* what) {
  if (!at_end()) fail(peek(), std::string("trailing input after ") + what);
}

FormulaId FormulaReader::formula() {
  auto t = next();
  switch (t.kind) {
    case Tok::Atom:
      if (t.text == "true") return store_.top();
      if (t.text == "false") return store_.bot();
      if (t.text == "not" || t.text == "and" || t.text == "or") fail(t, "operator '" + std::string(t.text) + "' outside parentheses");
      return store_.var(t.text);
    case Tok::LParen:
      break;
    case Tok::RParen:
      fail(t, "unexpected ')'");
    case Tok::Turnstile:
      fail(t, "unexpected '|-'");
    case Tok::End:
      fail(t, "unexpected end of input");
  }
  auto op = next();
  if (op.kind != Tok::Atom || (op.text != "not" && op.text != "and" && op.text != "or"))
    fail(op, "expected 'not', 'and' or 'or'");
  std::vector<FormulaId> args;
  while (peek().kind != Tok::RParen) {
    if (peek().kind == Tok::End) fail(peek(), "unclosed '('");
    args.push_back(formula());
  }
  next();
  if (op.text == "not") {
    if (args.size() != 1) fail(op, "'not' takes exactly one argument, got " + std::to_string(args.size()));
    return store_.make_not(args[0]);
  }
  if (args.empty()) fail(op, "'" + std::string(op.text) + "' needs at least one argument");
  const bool is_and = op.text == "and";
  FormulaId acc = args[0];
  for (std::size_t i = 1; i < args.size(); ++i)
    acc = is_and ? store_.make_and(acc, args[i]) : store_.make_or(acc, args[i]);
  return acc;
}

Inequality FormulaReader::inequality() {
  auto lhs = formula();
  auto t = next();
  if (t.kind != Tok::Turnstile) fail(t, "expected '|-'");
  auto rhs = formula();
  return {lhs, rhs};
}

FormulaId parse_formula(FormulaStore& store, std::string_view text) {
  FormulaReader r(store, text);
  auto f = r.formula();
  r.expect_end("formula");
  return f;
}

Inequality parse_goal(FormulaStore& store, std::string_view text) {
  FormulaReader r(store, text);
  auto g = r.inequality();
  r.expect_end("goal");
  return g;
}

std::vector<Inequality> parse_axioms(FormulaStore& store, std::string_view text) {
  FormulaReader r(store, text);
  std::vector<Inequality> out;
  while (!r.at_end()) out.push_back(r.inequality());
  return out;
}

std::string to_sexpr(const FormulaStore& store, FormulaId f) {
  std::string out;
  // Explicit stack: deep circuits overflow naive recursion.
  struct Frame {
    FormulaId f;
    int stage;
  };
  std::vector<Frame> stack{{f, 0}};
  while (!stack.empty()) {
    auto& fr = stack.back();
    const auto& n = store.node(fr.f);
    switch (n.kind) {
      case Kind::Var:
        out += store.name(fr.f);
        stack.pop_back();
        continue;
      case Kind::Top:
        out += "true";
        stack.pop_back();
        continue;
      case Kind::Bot:
        out += "false";
        stack.pop_back();
        continue;
      default:
        break;
    }
    const int arity = n.kind == Kind::Not ? 1 : 2;
    if (fr.stage == 0) {
      out += '(';
      out += kind_name(n.kind);
    }
    if (fr.stage < arity) {
      out += ' ';
      auto child = fr.stage == 0 ? n.left : n.right;
      ++fr.stage;
      stack.push_back({child, 0});
    } else {
      out += ')';
      stack.pop_back();
    }
  }
  return out;
}

}  // namespace ol
