#include "doctest.h"

#include "ol/circuits.hpp"
#include "ol/normalizer.hpp"
#include "ol/oracle.hpp"
#include "support/fixtures.hpp"

using namespace ol;

namespace {

std::vector<bool> bits_of(std::uint64_t m, std::size_t n) {
  std::vector<bool> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (m >> i) & 1;
  return v;
}

Assignment inputs_of(std::uint64_t m, std::size_t n) {
  Assignment a;
  for (std::size_t i = 0; i < n; ++i) a[input_name(i)] = (m >> i) & 1;
  return a;
}

// Binary AIGER writer used only to feed parse_aig.
std::string to_binary(const AigCircuit& c) {
  std::string out = "aig " + std::to_string(c.max_var) + " " + std::to_string(c.inputs.size()) + " 0 " +
                    std::to_string(c.outputs.size()) + " " + std::to_string(c.gates.size()) + "\n";
  for (auto o : c.outputs) out += std::to_string(o) + "\n";
  auto put = [&](std::uint32_t x) {
    while (x & ~0x7FU) {
      out += static_cast<char>((x & 0x7F) | 0x80);
      x >>= 7;
    }
    out += static_cast<char>(x);
  };
  for (const auto& g : c.gates) {
    put(g.lhs - g.rhs0);
    put(g.rhs0 - g.rhs1);
  }
  return out;
}

}  // namespace

TEST_CASE("parse_aag basics") {
  auto id = parse_aag("aag 1 1 0 1 0\n2\n2\n");
  CHECK(id.inputs == std::vector<AigLit>{2});
  CHECK(id.outputs == std::vector<AigLit>{2});
  CHECK(simulate(id, {true}) == std::vector<bool>{true});

  auto a = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
  REQUIRE(a.gates.size() == 1);
  CHECK(a.gates[0] == AigGate{6, 2, 4});
  CHECK(simulate(a, {true, false}) == std::vector<bool>{false});

  auto n = parse_aag("aag 3 2 0 1 1\n2\n4\n7\n6 2 4\n");
  CHECK(simulate(n, {true, true}) == std::vector<bool>{false});
  FormulaStore s;
  CHECK(cone_formula(s, a, 0) == s.make_and(s.var("i0"), s.var("i1")));
  CHECK(cone_formula(s, n, 0) == s.make_not(s.make_and(s.var("i0"), s.var("i1"))));
}

TEST_CASE("parse_aag errors") {
  auto line_of = [](const char* text) {
    try {
      parse_aag(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  try {
    parse_aag("aag 2 1 1 0 0\n2\n4 2\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("sequential circuits unsupported") != std::string::npos);
  }
  CHECK(line_of("aig 1 1 0 1 0\n2\n2\n") == 1);
  CHECK(line_of("aag 1 1 0 1\n2\n2\n") == 1);
  CHECK(line_of("aag 3 2 0 1 1\n2\n4\n6\n6 2 8\n") == 5);   // undefined / out of range
  CHECK(line_of("aag 3 2 0 1 1\n2\n5\n6\n6 2 4\n") == 3);   // odd input
  CHECK(line_of("aag 3 2 0 1 1\n4\n6\n2\n2 4 6\n") == 5);   // gate below an input
  CHECK(line_of("aag 4 2 0 1 2\n2\n4\n6\n6 2 8\n8 2 4\n") == 5);  // forward reference
  CHECK(line_of("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\nx0 foo\n") == 6);
  CHECK(line_of("aag 3 2 0 1 1\n2\n4\n9\n6 2 4\n") == 4);
  CHECK_THROWS_AS(parse_aag(""), ParseError);
}

TEST_CASE("fixture round trips and cone agreement") {
  const auto files = fixtures::aag_files();
  REQUIRE(files.size() >= 20);
  for (const auto& path : files) {
    CAPTURE(path.filename().string());
    const auto text = fixtures::read_file(path);
    auto c = parse_aag(text);
    CHECK(parse_aag(emit_aag(c)) == c);
    CHECK(emit_aag(parse_aag(emit_aag(c))) == emit_aag(c));
    if (c.inputs.size() <= 12 && c.gates.size() + 1 == c.max_var + 1 - c.inputs.size() + 1) {
      CHECK(parse_aig(to_binary(c)).gates == c.gates);
    }
    if (c.inputs.size() > 12) continue;
    FormulaStore s;
    std::vector<FormulaId> cones;
    for (std::size_t k = 0; k < c.outputs.size(); ++k) cones.push_back(cone_formula(s, c, k));
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.inputs.size()); ++m) {
      const auto sim = simulate(c, bits_of(m, c.inputs.size()));
      const auto asg = inputs_of(m, c.inputs.size());
      for (std::size_t k = 0; k < cones.size(); ++k) REQUIRE(evaluate(s, cones[k], asg) == sim[k]);
    }
  }
}

TEST_CASE("binary aiger") {
  auto c = array_multiplier(3);
  auto b = parse_aig(to_binary(c));
  CHECK(b.gates == c.gates);
  CHECK(b.outputs == c.outputs);
  CHECK(b.inputs == c.inputs);
  CHECK(parse_aiger(to_binary(c)).gates == c.gates);
  CHECK(parse_aiger(emit_aag(c)) == c);
  CHECK_THROWS_AS(parse_aig("aig 2 1 0 1 1\n4\n"), ParseError);
}

TEST_CASE("arithmetic generators") {
  auto add = ripple_carry_adder(2);
  auto mul = array_multiplier(4);
  CHECK(mul.outputs.size() == 8);
  for (unsigned x = 0; x < 4; ++x)
    for (unsigned y = 0; y < 4; ++y) {
      auto out = simulate(add, {bool(x & 1), bool(x & 2), bool(y & 1), bool(y & 2)});
      unsigned sum = 0;
      for (std::size_t k = 0; k < out.size(); ++k) sum |= unsigned(out[k]) << k;
      CHECK(sum == x + y);
    }
  for (unsigned x = 0; x < 16; ++x)
    for (unsigned y = 0; y < 16; ++y) {
      std::vector<bool> in;
      for (int k = 0; k < 4; ++k) in.push_back((x >> k) & 1);
      for (int k = 0; k < 4; ++k) in.push_back((y >> k) & 1);
      auto out = simulate(mul, in);
      unsigned p = 0;
      for (std::size_t k = 0; k < out.size(); ++k) p |= unsigned(out[k]) << k;
      REQUIRE(p == x * y);
    }
  // Sum bit of the 2-bit adder agrees with its cone on all 16 vectors.
  FormulaStore s;
  auto f = cone_formula(s, add, 1);
  for (std::uint64_t m = 0; m < 16; ++m) CHECK(evaluate(s, f, inputs_of(m, 4)) == simulate(add, bits_of(m, 4))[1]);
}

TEST_CASE("formula to circuit") {
  FormulaStore s;
  auto x = s.var("x"), a = s.var("a"), b = s.var("b");
  auto cx = formula_to_circuit(s, x);
  CHECK(cx.gates.empty());
  CHECK(cx.outputs == std::vector<AigLit>{cx.inputs[0]});
  auto cor = formula_to_circuit(s, s.make_or(a, b));
  REQUIRE(cor.gates.size() == 1);
  CHECK(cor.gates[0].rhs0 % 2 == 1);
  CHECK(cor.gates[0].rhs1 % 2 == 1);
  CHECK(cor.outputs[0] % 2 == 1);
  auto ab = s.make_and(a, b);
  CHECK(formula_to_circuit(s, s.make_or(ab, ab)).gates.size() == 2);
  auto ct = formula_to_circuit(s, s.make_and(s.top(), s.make_not(s.bot())));
  CHECK(ct.outputs == std::vector<AigLit>{1});

  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    FormulaStore t;
    auto f = random_formula(t, seed, 4, 8);
    const auto names = variables(t, f);
    auto c = formula_to_circuit(t, f);
    auto back = cone_formula(t, c, 0);
    // Rename i<k> back to the original variable names through the circuit inputs.
    for (std::uint64_t m = 0; m < (1u << names.size()); ++m) {
      Assignment orig, renamed;
      for (std::size_t i = 0; i < names.size(); ++i) {
        orig[names[i]] = (m >> i) & 1;
        renamed[input_name(i)] = (m >> i) & 1;
      }
      REQUIRE(evaluate(t, f, orig) == evaluate(t, back, renamed));
    }
  }
}

TEST_CASE("tseitin") {
  FormulaStore s;
  auto a = s.var("a"), b = s.var("b"), x = s.var("x");
  auto cnf = tseitin(s, s.make_and(a, b));
  CHECK(cnf.num_vars == 3);
  CHECK(cnf.clauses == std::vector<std::vector<int>>{{-3, 1}, {-3, 2}, {3, -1, -2}, {3}});
  CHECK_FALSE(dpll_satisfiable(tseitin(s, s.make_and(x, s.make_not(x)))));
  auto bot = tseitin(s, s.bot());
  CHECK(bot.num_vars == 1);
  CHECK(bot.clauses == std::vector<std::vector<int>>{{1}, {-1}});
  CHECK(dpll_satisfiable(tseitin(s, s.top())));
  CHECK(tseitin(s, s.make_and(a, b), false).clauses.size() == 3);

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    FormulaStore t;
    auto f = random_formula(t, seed, 1 + seed % 4, seed % 9);
    REQUIRE(dpll_satisfiable(tseitin(t, f)) == brute_force_satisfiable(t, f));
  }
}

TEST_CASE("miter") {
  FormulaStore s;
  auto x = s.var("x"), y = s.var("y");
  CHECK_FALSE(dpll_satisfiable(miter_cnf(s, x, x)));
  CHECK(dpll_satisfiable(miter_cnf(s, x, s.make_not(x))));
  CHECK_THROWS_AS(miter_cnf(s, x, y), std::invalid_argument);
  for (bool share : {false, true}) {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
      FormulaStore t;
      auto f = random_formula(t, seed, 3, 6);
      auto nf = normalize(t, f);
      REQUIRE_FALSE(dpll_satisfiable(miter_cnf(t, f, nf, share)));
      auto g = random_formula(t, seed + 1000, 3, 4);
      const auto fv = variables(t, f);
      bool subset = true;
      for (const auto& v : variables(t, g)) subset &= std::binary_search(fv.begin(), fv.end(), v);
      if (subset) REQUIRE(dpll_satisfiable(miter_cnf(t, f, g, share)) == !brute_force_equivalent(t, f, g));
    }
  }
  // Sharing identical subterms gives fewer variables.
  FormulaStore t;
  auto f = random_formula(t, 5, 3, 8);
  CHECK(miter_cnf(t, f, f, true).num_vars < miter_cnf(t, f, f, false).num_vars);
}

TEST_CASE("dimacs") {
  CnfInstance empty;
  CHECK(emit_dimacs(empty) == "p cnf 0 0\n");
  CnfInstance one{2, {{1, -2}}, {}};
  CHECK(emit_dimacs(one) == "p cnf 2 1\n1 -2 0\n");
  FormulaStore s;
  auto cnf = miter_cnf(s, random_formula(s, 3, 3, 7), random_formula(s, 4, 3, 5));
  CHECK(parse_dimacs(emit_dimacs(cnf)) == cnf);
  auto multi = parse_dimacs("c hello\np cnf 3 2\n1 2\n 3 0 -1\n0\n");
  CHECK(multi.clauses == std::vector<std::vector<int>>{{1, 2, 3}, {-1}});
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 2\n1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n1\n"), ParseError);
}
