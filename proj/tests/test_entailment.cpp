#include "doctest.h"

#include <algorithm>

#include "ol/entailment.hpp"
#include "ol/formula_io.hpp"

using namespace ol;

namespace {

bool proves(FormulaStore& s, std::string_view goal, std::string_view axioms = "") {
  auto g = parse_goal(s, goal);
  auto ax = parse_axioms(s, axioms);
  ProverOptions opt;
  opt.check_invariants = true;
  auto prepared = prepare_goal(s, g.lhs, g.rhs, ax, opt);
  auto r = saturate(prepared.state, prepared.goal, prepared.axioms, opt);
  REQUIRE(r.verdict != Verdict::LimitExceeded);
  auto check = check_derivations(prepared.state, s, prepared.axioms);
  CHECK_MESSAGE(check.ok, check.reason);
  return r.verdict == Verdict::Proved;
}

}  // namespace

TEST_CASE("prepare_goal converts to right-only form") {
  FormulaStore s;
  auto x = s.var("x"), y = s.var("y");
  auto p = prepare_goal(s, x, s.make_or(x, y), {});
  CHECK(p.goal == Sequent::of(s.make_not(x), s.make_or(x, y)));
  auto seeds = p.state.proven();
  CHECK(seeds.size() == 2);
  CHECK(p.state.is_proven(Sequent::of(x, s.make_not(x))));
  CHECK(p.state.is_proven(Sequent::of(y, s.make_not(y))));
  CHECK(p.state.worklist_size() == 2);

  SUBCASE("constants are encoded with the reserved variable") {
    auto q = prepare_goal(s, s.bot(), x, {});
    auto z = *s.find_var(kConstantVariable);
    CHECK(q.goal == Sequent::of(s.make_or(s.make_not(z), z), x));
  }

  SUBCASE("axiom formulas are inverse-closed") {
    auto a = s.var("a"), b = s.var("b");
    const Inequality ax[] = {{a, b}};
    auto q = prepare_goal(s, a, b, ax);
    REQUIRE(q.axioms.axioms.size() == 1);
    CHECK(q.axioms.axioms[0] == Sequent::of(s.make_not(a), b));
    std::vector<FormulaId> expect{a, s.make_not(a), b, s.make_not(b)};
    std::sort(expect.begin(), expect.end());
    CHECK(q.axioms.axiom_formulas == expect);
    for (auto f : q.state.universe()) CHECK(q.state.in_universe(s.inverse(f)));
  }
}

TEST_CASE("basic verdicts") {
  FormulaStore s;
  CHECK(proves(s, "x |- (or x y)"));
  CHECK(proves(s, "x |- x"));
  CHECK_FALSE(proves(s, "x |- y"));
  CHECK_FALSE(proves(s, "(and x (or (not x) y)) |- y"));
  CHECK(proves(s, "a |- c", "a |- b\nb |- c"));
  CHECK_FALSE(proves(s, "a |- c", "a |- b"));
  CHECK(proves(s, "(or (and a b) (and a c)) |- (and a (or b c))"));
  CHECK_FALSE(proves(s, "(and a (or b c)) |- (or (and a b) (and a c))"));
  CHECK(proves(s, "false |- x"));
  CHECK(proves(s, "x |- true"));
  CHECK_FALSE(proves(s, "true |- x"));
}

TEST_CASE("fifo order gives the same verdicts") {
  const char* goals[] = {"x |- (or x y)", "(and x (or (not x) y)) |- y", "(and a b) |- (or b c)",
                         "(not (and a b)) |- (or (not a) (not b))"};
  for (auto g : goals) {
    FormulaStore s1, s2;
    auto p1 = parse_goal(s1, g);
    auto p2 = parse_goal(s2, g);
    ProverOptions fifo;
    fifo.order = WorklistOrder::Fifo;
    CHECK(prove(s1, p1.lhs, p1.rhs).proved == prove(s2, p2.lhs, p2.rhs, {}, fifo).proved);
  }
}

TEST_CASE("saturation to exhaustion respects the space bounds") {
  FormulaStore s;
  auto g = parse_goal(s, "(and a (or b (not c))) |- (or (and c d) (not a))");
  auto ax = parse_axioms(s, "(and a d) |- b");
  ProverOptions opt;
  opt.check_invariants = true;
  auto p = prepare_goal(s, g.lhs, g.rhs, ax, opt);
  auto r = saturate(p.state, p.goal, p.axioms, opt);
  CHECK(r.verdict == Verdict::NotProvable);
  const auto n = p.state.universe().size();
  CHECK(p.state.proven_count() <= n * (n + 1) / 2);
  CHECK(p.state.worklist_size() == 0);
  for (const auto& q : p.state.proven()) {
    CHECK(p.state.in_universe(q.first));
    CHECK(p.state.in_universe(q.second));
  }
  CHECK_FALSE(p.state.check_invariants());
  CHECK(check_derivations(p.state, s, p.axioms).ok);
}

TEST_CASE("limits") {
  FormulaStore s;
  auto g = parse_goal(s, "(and a (or b c)) |- (or (and a b) (and a c))");
  ProverOptions opt;
  opt.limits.max_sequents = 3;
  CHECK_THROWS_AS(prove(s, g.lhs, g.rhs, {}, opt), LimitExceeded);
  try {
    prove(s, g.lhs, g.rhs, {}, opt);
  } catch (const LimitExceeded& e) {
    CHECK(e.stats().proven > 3);
  }
}

TEST_CASE("monotonicity in the axiom set") {
  FormulaStore s;
  auto g = parse_goal(s, "a |- c");
  auto small = parse_axioms(s, "a |- b\nb |- c");
  auto large = parse_axioms(s, "a |- b\nb |- c\n(and c d) |- (not a)");
  CHECK(prove(s, g.lhs, g.rhs, small).proved);
  CHECK(prove(s, g.lhs, g.rhs, large).proved);
}

TEST_CASE("derivation checker rejects forged records") {
  FormulaStore s;
  auto x = s.var("x"), y = s.var("y");
  auto p = prepare_goal(s, x, s.make_or(x, y), {});
  auto r = saturate(p.state, p.goal, p.axioms);
  REQUIRE(r.verdict == Verdict::Proved);
  REQUIRE(check_derivations(p.state, s, p.axioms).ok);

  auto rec = p.state.derivation(p.goal);
  REQUIRE(rec);
  CHECK(rec->rule == Rule::OrR);

  SUBCASE("cut on a non-axiom formula") {
    DerivationRecord forged{p.goal, Rule::Cut, {Sequent::of(x, s.make_not(x)), Sequent::of(x, s.make_not(x))}, x};
    p.state.overwrite_derivation(forged);
    auto check = check_derivations(p.state, s, p.axioms);
    CHECK_FALSE(check.ok);
    REQUIRE(check.offending);
    CHECK(*check.offending == p.goal);
  }
  SUBCASE("wrong rule") {
    DerivationRecord forged{p.goal, Rule::Replace, {Sequent::of(y, s.make_not(y))}, std::nullopt};
    p.state.overwrite_derivation(forged);
    CHECK_FALSE(check_derivations(p.state, s, p.axioms).ok);
  }
}
