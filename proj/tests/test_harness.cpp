#include "doctest.h"

#include <cmath>

#include "ol/circuits.hpp"
#include "ol/harness.hpp"
#include "ol/oracle.hpp"
#include "support/fixtures.hpp"

using namespace ol;

namespace {

SolverConfig mini_solver(std::int64_t timeout_ms = 60000) { return {OL_MINI_SAT, timeout_ms, {}}; }

// n+1 pigeons into n holes; hard for plain DPLL already at n = 9.
CnfInstance pigeonhole(int n) {
  CnfInstance cnf;
  auto var = [n](int p, int h) { return p * n + h + 1; };
  cnf.num_vars = static_cast<std::uint32_t>((n + 1) * n);
  for (int p = 0; p <= n; ++p) {
    std::vector<int> c;
    for (int h = 0; h < n; ++h) c.push_back(var(p, h));
    cnf.clauses.push_back(c);
  }
  for (int h = 0; h < n; ++h)
    for (int p = 0; p <= n; ++p)
      for (int q = p + 1; q <= n; ++q) cnf.clauses.push_back({-var(p, h), -var(q, h)});
  return cnf;
}

}  // namespace

TEST_CASE("solver verdict names") {
  for (auto v : {SolverVerdict::Sat, SolverVerdict::Unsat, SolverVerdict::Timeout, SolverVerdict::Error})
    CHECK(parse_solver_verdict(solver_verdict_name(v)) == v);
  CHECK_FALSE(parse_solver_verdict("UNKNOWN"));
}

TEST_CASE("external solver runs") {
  fixtures::TempDir dir("solver");
  FormulaStore s;
  auto x = s.var("x");
  fixtures::write_file(dir / "miter.cnf", emit_dimacs(miter_cnf(s, x, x)));
  fixtures::write_file(dir / "taut.cnf", emit_dimacs(tseitin(s, s.make_or(x, s.make_not(x)))));
  fixtures::write_file(dir / "php.cnf", emit_dimacs(pigeonhole(10)));

  auto r = run_external_solver(dir / "miter.cnf", mini_solver());
  CHECK(r.verdict == SolverVerdict::Unsat);
  CHECK(r.wall_ms > 0);
  CHECK(r.exit_code == 20);
  r = run_external_solver(dir / "taut.cnf", mini_solver());
  CHECK(r.verdict == SolverVerdict::Sat);
  CHECK(r.wall_ms > 0);

  r = run_external_solver(dir / "php.cnf", mini_solver(1));
  CHECK(r.verdict == SolverVerdict::Timeout);
  r = run_external_solver(dir / "php.cnf", mini_solver(150));
  CHECK(r.verdict == SolverVerdict::Timeout);
  CHECK(r.wall_ms >= 150);
  CHECK(r.wall_ms < 5000);

  r = run_external_solver(dir / "miter.cnf", {"/nonexistent/solver", 1000, {}});
  CHECK(r.verdict == SolverVerdict::Error);
  CHECK(r.stderr_text.find("not found") != std::string::npos);

  // Exit code fallback and unparsable output. The CNF path lands in $0.
  r = run_external_solver(dir / "miter.cnf", {"/bin/sh", 5000, {"-c", "exit 20"}});
  CHECK(r.verdict == SolverVerdict::Unsat);
  r = run_external_solver(dir / "miter.cnf", {"/bin/sh", 5000, {"-c", "exit 10"}});
  CHECK(r.verdict == SolverVerdict::Sat);
  r = run_external_solver(dir / "miter.cnf", {"/bin/sh", 5000, {"-c", "echo garbage; echo oops >&2; exit 0"}});
  CHECK(r.verdict == SolverVerdict::Error);
  CHECK(r.stderr_text.find("oops") != std::string::npos);
  // Status line wins over the exit code.
  r = run_external_solver(dir / "miter.cnf", {"/bin/sh", 5000, {"-c", "echo 's SATISFIABLE'; exit 20"}});
  CHECK(r.verdict == SolverVerdict::Sat);
}

TEST_CASE("genbench on a toy AND circuit") {
  fixtures::TempDir dir("gen_and");
  GenBenchOptions opt;
  opt.out_dir = dir / "out";
  opt.solver = mini_solver();
  auto recs = gen_bench(fixtures::path("aag/and2.aag"), opt);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].engine_proved);
  CHECK(recs[0].error.empty());
  CHECK(recs[0].solver_verdict == SolverVerdict::Unsat);
  CHECK(recs[0].size_orig == 1);
  const auto cnf = parse_dimacs(fixtures::read_file(dir / "out/and2_bit0.miter.cnf"));
  CHECK_FALSE(dpll_satisfiable(cnf));
  const auto cone = parse_aag(fixtures::read_file(dir / "out/and2_bit0.aag"));
  CHECK(cone.num_gates() == 1);
  CHECK(parse_aag(fixtures::read_file(dir / "out/and2_bit0.nf.aag")).num_gates() == 1);
}

TEST_CASE("genbench on a 4-bit multiplier") {
  fixtures::TempDir dir("gen_mult");
  fixtures::write_file(dir / "mult4.aag", emit_aag(array_multiplier(4)));
  GenBenchOptions opt;
  opt.out_dir = dir / "a";
  auto recs = gen_bench(dir / "mult4.aag", opt);
  REQUIRE(recs.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CAPTURE(k);
    CHECK(recs[k].bit == static_cast<std::int64_t>(k));
    CHECK(recs[k].engine_proved);
    CHECK_FALSE(recs[k].solver_verdict);
    const auto stem = "a/mult4_bit" + std::to_string(k);
    CHECK_FALSE(dpll_satisfiable(parse_dimacs(fixtures::read_file(dir / (stem + ".miter.cnf")))));
    // Cone and normal form agree on all 256 input vectors.
    const auto c = parse_aag(fixtures::read_file(dir / (stem + ".aag")));
    const auto n = parse_aag(fixtures::read_file(dir / (stem + ".nf.aag")));
    REQUIRE(c.num_inputs() == 8);
    REQUIRE(n.num_inputs() == 8);
    for (unsigned m = 0; m < 256; ++m) {
      std::vector<bool> in;
      for (int i = 0; i < 8; ++i) in.push_back((m >> i) & 1);
      REQUIRE(simulate(c, in) == simulate(n, in));
    }
  }

  // Determinism across runs and job counts.
  opt.out_dir = dir / "b";
  opt.jobs = 3;
  auto again = gen_bench(dir / "mult4.aag", opt);
  REQUIRE(again.size() == 8);
  for (const auto& e : std::filesystem::directory_iterator(dir / "a")) {
    CAPTURE(e.path().filename().string());
    CHECK(fixtures::read_file(e.path()) == fixtures::read_file(dir / "b" / e.path().filename()));
  }
  for (std::size_t k = 0; k < 8; ++k) CHECK(again[k].size_nf == recs[k].size_nf);
}

TEST_CASE("genbench records bad bits and continues") {
  fixtures::TempDir dir("gen_bad");
  GenBenchOptions opt;
  opt.out_dir = dir.path();
  opt.bits = {0, 7, -1};
  auto recs = gen_bench(fixtures::path("aag/xor2.aag"), opt);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].bit == -1);
  CHECK(recs[0].solver_verdict == SolverVerdict::Error);
  CHECK(recs[1].bit == 0);
  CHECK(recs[1].engine_proved);
  CHECK(recs[2].bit == 7);
  CHECK(recs[2].solver_verdict == SolverVerdict::Error);
  CHECK(recs[2].error.find("out of range") != std::string::npos);
}

TEST_CASE("preprocess") {
  fixtures::TempDir dir("pre");
  auto res = preprocess(fixtures::path("aag/absorb.aag"), dir / "absorb.cnf");
  CHECK(res.cnf_orig == dir / "absorb.orig.cnf");
  const auto nf = parse_dimacs(fixtures::read_file(dir / "absorb.cnf"));
  const auto orig = parse_dimacs(fixtures::read_file(dir / "absorb.orig.cnf"));
  // Internal variables: everything after the inputs.
  CHECK(nf.num_vars - 1 < orig.num_vars - 2);
  CHECK(res.size_nf < res.size_orig);

  res = preprocess(fixtures::path("aag/and2.aag"), dir / "and2.cnf");
  CHECK(res.size_nf <= res.size_orig);

  preprocess(fixtures::path("aag/contradiction.aag"), dir / "contra.cnf");
  const auto contra = parse_dimacs(fixtures::read_file(dir / "contra.cnf"));
  CHECK(contra.num_vars == 1);
  CHECK(contra.clauses == std::vector<std::vector<int>>{{1}, {-1}});

  // Both sides keep the satisfiability of the asserted outputs.
  for (const auto& p : fixtures::aag_files()) {
    CAPTURE(p.filename().string());
    const auto c = parse_aag(fixtures::read_file(p));
    if (c.num_inputs() > 10) continue;
    preprocess(p, dir / "x.cnf");
    const bool a = dpll_satisfiable(parse_dimacs(fixtures::read_file(dir / "x.cnf")));
    const bool b = dpll_satisfiable(parse_dimacs(fixtures::read_file(dir / "x.orig.cnf")));
    CHECK(a == b);
    bool any = false;
    for (unsigned m = 0; m < (1u << c.num_inputs()) && !any; ++m) {
      std::vector<bool> in;
      for (std::size_t i = 0; i < c.num_inputs(); ++i) in.push_back((m >> i) & 1);
      const auto out = simulate(c, in);
      any = std::all_of(out.begin(), out.end(), [](bool v) { return v; });
    }
    CHECK(a == any);
  }
}

TEST_CASE("speed-up formulas") {
  CHECK(std::abs(speed_up(2468.6, 1611.4) - 0.5319) < 1e-3);
  CHECK(std::abs(speed_up_with_norm(2468.6, 1611.4, 5000) - -0.6266) < 1e-3);
  CHECK(std::abs(speed_up(27278.4, 12302.6) - 1.2173) < 1e-3);
  CHECK(std::abs(speed_up_with_norm(27278.4, 12302.6, 41000) - -0.4882) < 1e-3);
  CHECK(speed_up(1234.5, 1234.5) == 0.0);
  CHECK(speed_up_with_norm(1234.5, 1234.5, 0) == 0.0);
}

TEST_CASE("bench csv") {
  BenchRecord r;
  r.problem = "p";
  r.bit = 3;
  r.size_orig = 10;
  r.size_nf = 7;
  r.ol_norm_ms = 1.25;
  r.solver_verdict = SolverVerdict::Unsat;
  r.solver_ms_orig = 100;
  r.solver_ms_nf = 50;
  const auto text = bench_csv({r});
  CHECK(text.substr(0, kBenchCsvHeader.size()) == kBenchCsvHeader);
  CHECK(text.find("\np,3,10,7,1.25,,UNSAT,100,50,,\n") != std::string::npos);
  const auto back = parse_bench_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(bench_csv(back) == text);

  const std::string head(kBenchCsvHeader);
  auto error_line = [](const std::string& t) {
    try {
      parse_bench_csv(t);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(error_line(head + "\np,0,1,1,1,1,UNSAT,1,1,,\np,0,1,1,1\n") == 3);
  CHECK(error_line(head + "\np,0,1,1,1,1,MAYBE,1,1,,\n") == 2);
  CHECK(error_line(head + "\np,0,1,1,x,1,SAT,1,1,,\n") == 2);
  CHECK(error_line(head + "\np,0,1,1,-4,1,SAT,1,1,,\n") == 2);
  CHECK(error_line("a,b\n") == 1);
  CHECK(error_line("") == 1);
}

TEST_CASE("report") {
  std::vector<BenchRecord> rows(4);
  for (auto& r : rows) {
    r.problem = "r";
    r.solver_ms_orig = 300;
    r.solver_ms_nf = 100;
    r.ol_norm_ms = 50;
  }
  rows[1].solver_ms_orig = 100;
  rows[2].solver_verdict = SolverVerdict::Timeout;
  rows[3].solver_ms_nf.reset();
  auto rep = make_report(rows);
  CHECK(rep.averaged == 2);
  CHECK(*rep.mean_speed_up == doctest::Approx((2.0 + 0.0) / 2));
  CHECK(*rep.mean_speed_up_with_norm == doctest::Approx((1.0 + (100.0 / 150 - 1)) / 2));
  CHECK(rep.rows[2].speed_up);
  CHECK_FALSE(rep.rows[3].speed_up);
  const auto table = format_report_table(rep);
  CHECK(table.find("speed_up_with_norm") != std::string::npos);
  CHECK(table.find("mean over 2 rows") != std::string::npos);
}

TEST_CASE("published rows reproduce") {
  const auto rows = parse_bench_csv(fixtures::read_file(fixtures::path("bench/published_rows.csv")));
  REQUIRE(rows.size() >= 10);
  const auto rep = make_report(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(rows[i].problem);
    CHECK(std::abs(*rep.rows[i].speed_up - *rows[i].speed_up) < 1e-3);
    CHECK(std::abs(*rep.rows[i].speed_up_with_norm - *rows[i].speed_up_with_norm) < 1e-3);
  }
}
