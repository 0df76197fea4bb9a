#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ol/circuits.hpp"
#include "ol/entailment.hpp"
#include "ol/formula_io.hpp"
#include "ol/harness.hpp"
#include "ol/normalizer.hpp"
#include "ol/oracle.hpp"

namespace fs = std::filesystem;
using namespace ol;

namespace {

// Exit codes shared by every subcommand; prove maps its verdict onto 0..2.
constexpr int kExitProved = 0;
constexpr int kExitNotProvable = 1;
constexpr int kExitLimit = 2;
constexpr int kExitInput = 3;
constexpr int kExitMismatch = 4;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  if (p.empty() || p == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + p.string() + "'");
  out << text;
}

bool is_aiger(const fs::path& p) { return p.extension() == ".aag" || p.extension() == ".aig"; }

std::vector<std::string> circuit_inputs(const AigCircuit& c) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < c.num_inputs(); ++i) v.push_back(input_name(i));
  return v;
}

// A formula file, or output `bit` of an AIGER file read as a cone.
FormulaId load_formula(FormulaStore& store, const fs::path& p, std::size_t bit = 0) {
  const auto text = slurp(p);
  if (!is_aiger(p)) return parse_formula(store, text);
  const auto c = parse_aiger(text);
  if (bit >= c.outputs.size()) throw InputError("'" + p.string() + "' has no output " + std::to_string(bit));
  return cone_formula(store, c, bit);
}

std::vector<FormulaId> load_roots(FormulaStore& store, const fs::path& p) {
  const auto text = slurp(p);
  if (!is_aiger(p)) return {parse_formula(store, text)};
  const auto c = parse_aiger(text);
  std::vector<FormulaId> roots;
  for (std::size_t k = 0; k < c.outputs.size(); ++k) roots.push_back(cone_formula(store, c, k));
  return roots;
}

struct Globals {
  std::string solver;
  std::int64_t timeout_ms = 300000;
  bool timeout_given = false;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
};

std::optional<SolverConfig> solver_config(const Globals& g, bool required) {
  std::optional<std::string> path;
  if (!g.solver.empty()) {
    path = resolve_executable(g.solver);
    if (!path) throw InputError("solver not found: '" + g.solver + "'");
  } else if (required) {
    path = find_solver();
    if (!path) throw InputError("no SAT solver configured (use --solver or ORTHO_SAT_SOLVER)");
  }
  if (!path) return std::nullopt;
  return SolverConfig{*path, g.timeout_ms, {}};
}

void print_stats(const ProofStats& s) {
  std::cout << "universe " << s.universe_size << "\naxioms " << s.axioms << "\nproven " << s.proven << "\nattempts "
            << s.attempts << "\niterations " << s.iterations << "\nms " << s.millis << "\n";
}

struct ProveArgs {
  fs::path goal, axioms;
  bool stats = false, check = false, oracle = false;
  std::size_t max_sequents = 0;
};

int run_prove(const ProveArgs& a, const Globals& g) {
  FormulaStore store;
  const auto goal = parse_goal(store, slurp(a.goal));
  std::vector<Inequality> axioms;
  if (!a.axioms.empty()) axioms = parse_axioms(store, slurp(a.axioms));

  ProverOptions opt;
  opt.record_derivations = a.check;
  if (a.max_sequents) opt.limits.max_sequents = a.max_sequents;
  if (g.timeout_given) opt.limits.max_time = std::chrono::milliseconds(g.timeout_ms);

  auto prepared = prepare_goal(store, goal.lhs, goal.rhs, axioms, opt);
  const auto res = saturate(prepared.state, prepared.goal, prepared.axioms, opt);
  std::cout << verdict_name(res.verdict) << "\n";
  if (a.stats) print_stats(res.stats);
  int code = res.verdict == Verdict::Proved        ? kExitProved
             : res.verdict == Verdict::NotProvable ? kExitNotProvable
                                                   : kExitLimit;
  if (a.check && res.verdict == Verdict::Proved) {
    const auto chk = check_derivations(prepared.state, store, prepared.axioms);
    std::cout << "proof check: " << (chk.ok ? "ok" : "FAILED " + chk.reason) << "\n";
    if (!chk.ok) code = kExitMismatch;
  }
  if (a.oracle) {
    NaiveOptions nopt;
    const bool naive = naive_prove(store, prepared.goal, prepared.axioms, nopt);
    std::cout << "oracle: " << (naive ? "Proved" : "NotProvable") << "\n";
    if (res.verdict != Verdict::LimitExceeded && naive != (res.verdict == Verdict::Proved)) {
      std::cerr << "engine and oracle disagree\n";
      code = kExitMismatch;
    }
  }
  return code;
}

int run_normalize(const fs::path& in, const fs::path& out, bool stats) {
  FormulaStore store;
  Normalizer norm(store);
  const auto text = slurp(in);
  if (is_aiger(in)) {
    const auto c = parse_aiger(text);
    std::vector<FormulaId> nfs;
    for (std::size_t k = 0; k < c.outputs.size(); ++k) nfs.push_back(norm.normalize(cone_formula(store, c, k)));
    auto nc = formulas_to_circuit(store, nfs, circuit_inputs(c));
    if (stats) std::cerr << "gates " << c.num_gates() << " -> " << nc.num_gates() << "\n";
    spill(out, emit_aag(nc));
    return 0;
  }
  const auto f = parse_formula(store, text);
  const auto nf = norm.normalize(f);
  if (stats) std::cerr << "connectives " << connective_count(store, f) << " -> " << connective_count(store, nf) << "\n";
  spill(out, to_sexpr(store, nf) + "\n");
  return 0;
}

int run_cone(const fs::path& aig, std::size_t bit, const fs::path& out) {
  FormulaStore store;
  const auto c = parse_aiger(slurp(aig));
  if (bit >= c.outputs.size()) throw InputError("bit " + std::to_string(bit) + " out of range");
  const auto f = cone_formula(store, c, bit);
  if (is_aiger(out))
    spill(out, emit_aag(formula_to_circuit(store, f, circuit_inputs(c))));
  else
    spill(out, to_sexpr(store, f) + "\n");
  return 0;
}

int run_tseitin(const fs::path& in, const fs::path& out, bool no_assert) {
  FormulaStore store;
  const auto roots = load_roots(store, in);
  spill(out, emit_dimacs(tseitin(store, roots, !no_assert)));
  return 0;
}

int run_miter(const fs::path& left, const fs::path& right, const fs::path& out, bool share) {
  FormulaStore store;
  const auto f = load_formula(store, left);
  const auto g = load_formula(store, right);
  spill(out, emit_dimacs(miter_cnf(store, f, g, share)));
  return 0;
}

std::vector<std::int64_t> parse_bits(const std::string& list) {
  std::vector<std::int64_t> bits;
  if (list.empty() || list == "all") return bits;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      bits.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("bad bit list '" + list + "'");
    }
  }
  return bits;
}

int run_genbench(const fs::path& aig, const std::string& bits, const fs::path& out_dir, const fs::path& csv,
                 const Globals& g) {
  GenBenchOptions opt;
  opt.bits = parse_bits(bits);
  opt.out_dir = out_dir;
  opt.jobs = g.jobs;
  opt.solver = solver_config(g, false);
  const auto records = gen_bench(aig, opt);
  for (const auto& r : records)
    if (!r.error.empty()) std::cerr << r.problem << " bit " << r.bit << ": " << r.error << "\n";
  spill(csv, bench_csv(records));
  return 0;
}

int run_preprocess(const fs::path& aig, const fs::path& out, const fs::path& csv, const Globals& g) {
  const auto res = preprocess(aig, out);
  std::cout << "size_orig " << res.size_orig << "\nsize_nf " << res.size_nf << "\nnorm_ms " << res.norm_ms
            << "\ncnf_vars_orig " << res.vars_orig << "\ncnf_vars_nf " << res.vars_nf << "\n";
  const auto solver = solver_config(g, false);
  if (!solver) return 0;
  BenchRecord r;
  r.problem = aig.stem().string();
  r.bit = -1;
  r.size_orig = res.size_orig;
  r.size_nf = res.size_nf;
  r.ol_norm_ms = res.norm_ms;
  const auto a = run_external_solver(res.cnf_orig, *solver);
  const auto b = run_external_solver(res.cnf_nf, *solver);
  r.solver_ms_orig = a.wall_ms;
  r.solver_ms_nf = b.wall_ms;
  // The row verdict is the worse of the two runs; a disagreement is an error.
  if (a.verdict == SolverVerdict::Timeout || b.verdict == SolverVerdict::Timeout)
    r.solver_verdict = SolverVerdict::Timeout;
  else if (a.verdict != b.verdict)
    r.solver_verdict = SolverVerdict::Error;
  else
    r.solver_verdict = a.verdict;
  auto rep = make_report({r});
  if (!csv.empty()) spill(csv, bench_csv(rep.rows));
  std::cout << format_report_table(rep);
  return r.solver_verdict == SolverVerdict::Error ? kExitMismatch : 0;
}

int run_solve(const fs::path& cnf, const Globals& g) {
  const auto cfg = solver_config(g, true);
  const auto res = run_external_solver(cnf, *cfg);
  std::cout << solver_verdict_name(res.verdict) << " " << res.wall_ms << " ms\n";
  if (res.verdict == SolverVerdict::Error) {
    std::cerr << res.stderr_text << "\n";
    return kExitInput;
  }
  return 0;
}

int run_report(const fs::path& csv, const fs::path& out_csv) {
  const auto rep = make_report(parse_bench_csv(slurp(csv)));
  std::cout << format_report_table(rep);
  if (out_csv.empty())
    std::cout << "\n" << bench_csv(rep.rows);
  else
    spill(out_csv, bench_csv(rep.rows));
  return 0;
}

int run_random(unsigned vars, unsigned connectives, unsigned count, const Globals& g) {
  FormulaStore store;
  for (unsigned i = 0; i < count; ++i)
    std::cout << to_sexpr(store, random_formula(store, g.seed + i, vars, connectives)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthologic entailment, normalization and circuit benchmarking"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--solver", g.solver, "SAT solver executable");
  auto* timeout = app.add_option("--timeout-ms", g.timeout_ms, "solver budget; prover time limit for prove")
                      ->check(CLI::NonNegativeNumber);
  app.add_option("--jobs", g.jobs, "parallel benchmark workers")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for random");

  int code = 0;

  ProveArgs pa;
  auto* prove_cmd = app.add_subcommand("prove", "decide lhs |- rhs under optional axioms");
  prove_cmd->add_option("--goal", pa.goal, "goal file")->required();
  prove_cmd->add_option("--axioms", pa.axioms, "axioms file, one inequality per line");
  prove_cmd->add_flag("--stats", pa.stats, "print engine counters");
  prove_cmd->add_flag("--check-proof", pa.check, "record and replay derivations");
  prove_cmd->add_option("--max-sequents", pa.max_sequents, "sequent budget");
  prove_cmd->add_flag("--oracle", pa.oracle, "also run the backward oracle and compare");

  fs::path in, out;
  bool stats = false;
  auto* norm_cmd = app.add_subcommand("normalize", "normal form of a formula or of every circuit output");
  norm_cmd->add_option("--in", in)->required();
  norm_cmd->add_option("--out", out, "output file, '-' for stdout")->default_val("-");
  norm_cmd->add_flag("--stats", stats, "print size change to stderr");

  std::size_t bit = 0;
  auto* cone_cmd = app.add_subcommand("cone", "extract the cone of one output");
  cone_cmd->add_option("--aig", in)->required();
  cone_cmd->add_option("--bit", bit)->required();
  cone_cmd->add_option("--out", out, ".aag writes a circuit, anything else a formula")->default_val("-");

  bool no_assert = false;
  auto* ts_cmd = app.add_subcommand("tseitin", "clausify a formula or circuit");
  ts_cmd->add_option("--in", in)->required();
  ts_cmd->add_option("--out", out)->default_val("-");
  ts_cmd->add_flag("--no-assert-root", no_assert);

  fs::path right;
  bool share = false;
  auto* miter_cmd = app.add_subcommand("miter", "CNF that is UNSAT iff both sides are equivalent");
  miter_cmd->add_option("--left", in)->required();
  miter_cmd->add_option("--right", right)->required();
  miter_cmd->add_option("--out", out)->default_val("-");
  miter_cmd->add_flag("--share-subterms", share);

  std::string bits;
  fs::path csv;
  auto* gen_cmd = app.add_subcommand("genbench", "per-bit cones, normal forms and miters");
  gen_cmd->add_option("--aig", in)->required();
  gen_cmd->add_option("--bits", bits, "'all' or a comma-separated list")->default_val("all");
  gen_cmd->add_option("--out-dir", out)->required();
  gen_cmd->add_option("--csv", csv, "records, default stdout");

  auto* pre_cmd = app.add_subcommand("preprocess", "normalized and original CNF of a circuit");
  pre_cmd->add_option("--aig", in)->required();
  pre_cmd->add_option("--out", out)->required();
  pre_cmd->add_option("--csv", csv, "record with solver times when --solver is given");

  auto* solve_cmd = app.add_subcommand("solve-ext", "run the external solver on a CNF");
  solve_cmd->add_option("--cnf", in)->required();

  auto* rep_cmd = app.add_subcommand("report", "recompute speed-ups from a records CSV");
  rep_cmd->add_option("--csv", in)->required();
  rep_cmd->add_option("--out-csv", out);

  unsigned vars = 3, conns = 6, count = 1;
  auto* rnd_cmd = app.add_subcommand("random", "seeded random formulas");
  rnd_cmd->add_option("--vars", vars)->check(CLI::Range(1u, 26u));
  rnd_cmd->add_option("--connectives", conns)->check(CLI::Range(0u, 33u));
  rnd_cmd->add_option("--count", count);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }
  g.timeout_given = timeout->count() > 0;

  try {
    if (*prove_cmd) code = run_prove(pa, g);
    else if (*norm_cmd) code = run_normalize(in, out, stats);
    else if (*cone_cmd) code = run_cone(in, bit, out);
    else if (*ts_cmd) code = run_tseitin(in, out, no_assert);
    else if (*miter_cmd) code = run_miter(in, right, out, share);
    else if (*gen_cmd) code = run_genbench(in, bits, out, csv, g);
    else if (*pre_cmd) code = run_preprocess(in, out, csv, g);
    else if (*solve_cmd) code = run_solve(in, g);
    else if (*rep_cmd) code = run_report(in, out);
    else if (*rnd_cmd) code = run_random(vars, conns, count, g);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return code;
}
