#include "doctest.h"

#include "ol/formula.hpp"
#include "ol/formula_io.hpp"

using namespace ol;

TEST_CASE("interning is structural and idempotent") {
  FormulaStore s;
  auto a = s.var("a");
  auto b = s.var("b");
  CHECK(s.make_and(a, b) == s.make_and(a, b));
  CHECK(s.make_and(a, b) != s.make_and(b, a));
  CHECK(s.var("x") == s.var("x"));
  auto nn = s.make_not(s.make_not(a));
  CHECK(nn != a);
  CHECK(s.kind(nn) == Kind::Not);
  CHECK(s.top() == s.top());
}

TEST_CASE("intern rejects wrong arity") {
  FormulaStore s;
  auto a = s.var("a");
  const FormulaId one[] = {a};
  const FormulaId two[] = {a, a};
  CHECK_THROWS_AS(s.intern(Kind::And, one), StructuralError);
  CHECK_THROWS_AS(s.intern(Kind::Not, two), StructuralError);
  CHECK_THROWS_AS(s.intern(Kind::Top, one), StructuralError);
  const FormulaId bogus[] = {FormulaId{1234}};
  CHECK_THROWS_AS(s.intern(Kind::Not, bogus), StructuralError);
}

TEST_CASE("parser") {
  FormulaStore s;
  auto a = s.var("a"), b = s.var("b"), c = s.var("c");
  CHECK(parse_formula(s, "(and a (or b (not c)))") == s.make_and(a, s.make_or(b, s.make_not(c))));
  CHECK(parse_formula(s, "(and a b c)") == s.make_and(s.make_and(a, b), c));
  CHECK(parse_formula(s, "(not true)") == s.make_not(s.top()));
  CHECK(parse_formula(s, "(or a)") == a);
  CHECK(parse_formula(s, "  ; comment\n (and a\n  b) ; trailing") == s.make_and(a, b));
  CHECK(to_sexpr(s, parse_formula(s, "(or (not a) false)")) == "(or (not a) false)");

  SUBCASE("errors carry positions") {
    try {
      parse_formula(s, "(and a\n  (foo b))");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 4);
    }
    CHECK_THROWS_AS(parse_formula(s, "(and)"), ParseError);
    CHECK_THROWS_AS(parse_formula(s, "(not a b)"), ParseError);
    CHECK_THROWS_AS(parse_formula(s, "(and a"), ParseError);
    CHECK_THROWS_AS(parse_formula(s, "a b"), ParseError);
    CHECK_THROWS_AS(parse_formula(s, "a$"), ParseError);
  }

  SUBCASE("goals and axioms") {
    auto g = parse_goal(s, "(and a b) |- a");
    CHECK(g.lhs == s.make_and(a, b));
    CHECK(g.rhs == a);
    auto ax = parse_axioms(s, "a |- b\nb |- c ; second\n");
    REQUIRE(ax.size() == 2);
    CHECK(ax[1].lhs == b);
    CHECK(parse_axioms(s, "  ").empty());
    CHECK_THROWS_AS(parse_goal(s, "a b"), ParseError);
  }
}

TEST_CASE("nnf and inverse") {
  FormulaStore s;
  auto a = s.var("a"), b = s.var("b"), c = s.var("c");
  auto na = s.make_not(a), nb = s.make_not(b);
  CHECK(s.nnf(s.make_not(s.make_and(a, b))) == s.make_or(na, nb));
  CHECK(s.nnf(s.make_not(s.make_not(a))) == a);
  auto f = s.make_and(a, s.make_or(b, s.make_not(c)));
  CHECK(s.nnf(f) == f);
  CHECK(s.nnf(s.make_not(s.top())) == s.bot());
  CHECK(s.nnf(s.make_not(s.bot())) == s.top());

  CHECK(s.inverse(a) == na);
  CHECK(s.inverse(s.make_or(na, nb)) == s.make_and(a, b));
  auto g = s.make_and(a, nb);
  CHECK(s.inverse(s.inverse(g)) == g);
  CHECK_THROWS_AS(s.inverse(s.make_not(s.make_not(a))), ContractViolation);
  CHECK_THROWS_AS(s.inverse(s.make_not(g)), ContractViolation);
}

TEST_CASE("evaluation") {
  FormulaStore s;
  auto x = s.var("x");
  CHECK_FALSE(evaluate(s, s.make_and(x, s.make_not(x)), {{"x", true}}));
  CHECK(evaluate(s, s.make_or(x, s.make_not(x)), {{"x", false}}));
  auto f = parse_formula(s, "(or (and a b) c)");
  CHECK(evaluate(s, f, {{"a", true}, {"b", false}, {"c", true}}));
  try {
    evaluate(s, f, {{"a", true}});
    FAIL("expected an error");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
}

TEST_CASE("connective count and sizes") {
  FormulaStore s;
  auto a = s.var("a"), b = s.var("b"), c = s.var("c");
  CHECK(connective_count(s, a) == 0);
  auto ab = s.make_and(a, b);
  CHECK(connective_count(s, s.make_or(ab, ab)) == 2);
  CHECK(connective_count(s, s.make_and(a, s.make_or(b, c))) == 2);
  CHECK(dag_size(s, s.make_or(ab, ab)) == 4);
  CHECK(variables(s, s.make_and(c, ab)) == std::vector<std::string>{"a", "b", "c"});
}

namespace {

// Deterministic pseudo-random formula for property checks in this file only.
FormulaId scramble(FormulaStore& s, std::uint64_t& state, int depth) {
  state = state * 6364136223846793005ULL + 1442695040888963407ULL;
  const auto r = state >> 33;
  if (depth == 0 || r % 7 == 0) {
    auto v = s.var(std::string(1, static_cast<char>('a' + r % 4)));
    return (r >> 3) & 1 ? s.make_not(v) : v;
  }
  switch (r % 5) {
    case 0: return s.make_not(scramble(s, state, depth - 1));
    case 1: return r % 11 == 0 ? s.top() : s.make_and(scramble(s, state, depth - 1), scramble(s, state, depth - 1));
    case 2: return r % 13 == 0 ? s.bot() : s.make_or(scramble(s, state, depth - 1), scramble(s, state, depth - 1));
    case 3: return s.make_and(scramble(s, state, depth - 1), scramble(s, state, depth - 1));
    default: return s.make_or(scramble(s, state, depth - 1), scramble(s, state, depth - 1));
  }
}

}  // namespace

TEST_CASE("nnf properties on random formulas") {
  std::uint64_t seed = 7;
  for (int iter = 0; iter < 300; ++iter) {
    FormulaStore s;
    auto f = scramble(s, seed, 6);
    auto n = s.nnf(f);
    CHECK(s.is_nnf(n));
    CHECK(s.nnf(n) == n);
    CHECK(s.inverse(s.inverse(n)) == n);
    const auto vars = variables(s, f);
    for (unsigned m = 0; m < (1u << vars.size()); ++m) {
      Assignment asg;
      for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = (m >> i) & 1;
      REQUIRE(evaluate(s, f, asg) == evaluate(s, n, asg));
      REQUIRE(evaluate(s, s.inverse(n), asg) == !evaluate(s, n, asg));
    }
  }
}

TEST_CASE("universe bound: at most 2n NNF nodes including inverses") {
  std::uint64_t seed = 99;
  for (int iter = 0; iter < 200; ++iter) {
    FormulaStore s;
    auto f = scramble(s, seed, 7);
    if (contains_constant(s, f)) continue;
    // Count distinct subformulas of the input, ignoring double-negation wrappers
    // that nnf removes, then compare with the NNF universe.
    const auto n = dag_size(s, f);
    auto g = s.nnf(f);
    const FormulaId roots[] = {g, s.inverse(g)};
    CHECK(topo_order(s, roots).size() <= 2 * n);
  }
}

TEST_CASE("batch evaluator matches evaluate") {
  FormulaStore s;
  auto f = parse_formula(s, "(or (and a (not b)) (and c (or a b)))");
  BatchEvaluator be(s, f, {"a", "b", "c"});
  std::uint64_t in[3] = {0, 0, 0};
  for (unsigned m = 0; m < 8; ++m)
    for (int i = 0; i < 3; ++i)
      if ((m >> i) & 1) in[i] |= std::uint64_t{1} << m;
  const auto out = be.run(in);
  for (unsigned m = 0; m < 8; ++m) {
    Assignment asg{{"a", m & 1}, {"b", (m >> 1) & 1}, {"c", (m >> 2) & 1}};
    CHECK(((out >> m) & 1) == evaluate(s, f, asg));
  }
  CHECK_THROWS_AS(BatchEvaluator(s, f, {"a"}), EvaluationError);
}
