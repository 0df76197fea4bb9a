#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ol/entailment.hpp"

namespace ol {

enum class SolverVerdict { Sat, Unsat, Timeout, Error };
std::string_view solver_verdict_name(SolverVerdict v);
std::optional<SolverVerdict> parse_solver_verdict(std::string_view s);

struct SolverConfig {
  std::string path;
  std::int64_t timeout_ms = 300000;
  std::vector<std::string> extra_args;
};

struct SolverResult {
  SolverVerdict verdict = SolverVerdict::Error;
  double wall_ms = 0.0;
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

/// Runs `config.path [extra_args...] cnf` and waits for it. The verdict comes
/// from the "s ..." status line, falling back to exit codes 10/20. The child
/// is killed when the budget runs out.
SolverResult run_external_solver(const std::filesystem::path& cnf, const SolverConfig& config);

/// ORTHO_SAT_SOLVER if set, otherwise the first of kissat/cadical/minisat on PATH.
std::optional<std::string> find_solver();

/// Resolves a bare command name against PATH; paths with a slash are checked as is.
std::optional<std::string> resolve_executable(const std::string& name);

struct BenchRecord {
  std::string problem;
  std::int64_t bit = 0;
  std::optional<std::uint64_t> size_orig;
  std::optional<std::uint64_t> size_nf;
  std::optional<double> ol_norm_ms;
  std::optional<double> ol_prove_ms;
  std::optional<SolverVerdict> solver_verdict;
  std::optional<double> solver_ms_orig;
  std::optional<double> solver_ms_nf;
  std::optional<double> speed_up;
  std::optional<double> speed_up_with_norm;
  /// Not serialized. Set for per-bit failures and engine disagreements.
  std::string error;
  bool engine_proved = false;
};

inline constexpr std::string_view kBenchCsvHeader =
    "problem,bit,size_orig,size_nf,ol_norm_ms,ol_prove_ms,solver_verdict,solver_ms_orig,solver_ms_nf,speed_up,"
    "speed_up_with_norm";

std::string bench_csv_row(const BenchRecord& r);
std::string bench_csv(const std::vector<BenchRecord>& records);

/// Parses a CSV with the header above. Errors are ParseError carrying the
/// 1-based file line.
std::vector<BenchRecord> parse_bench_csv(std::string_view text);

/// orig / nf − 1 and orig / (nf + norm) − 1.
double speed_up(double orig_ms, double nf_ms);
double speed_up_with_norm(double orig_ms, double nf_ms, double norm_ms);

struct GenBenchOptions {
  /// Empty selects every output.
  std::vector<std::int64_t> bits;
  std::filesystem::path out_dir;
  std::optional<SolverConfig> solver;
  unsigned jobs = 1;
  Limits prove_limits;
};

/// Per selected output bit: writes the cone, its normal form and their miter,
/// times normalization and the engine on cone ⊢ NF, and optionally the solver
/// on the miter. Failing bits give a record with an ERROR verdict and a
/// message in `error`. Records come back in bit order.
std::vector<BenchRecord> gen_bench(const std::filesystem::path& aig_path, const GenBenchOptions& options);

struct PreprocessResult {
  std::uint64_t size_orig = 0;
  std::uint64_t size_nf = 0;
  double norm_ms = 0.0;
  std::uint32_t vars_orig = 0;
  std::uint32_t vars_nf = 0;
  std::filesystem::path cnf_nf;
  std::filesystem::path cnf_orig;
};

/// Normalizes every output cone in one store, then writes the Tseitin CNF of
/// the normalized outputs to `out_cnf` and that of the original outputs next
/// to it (".orig.cnf"). Every output is asserted.
PreprocessResult preprocess(const std::filesystem::path& aig_path, const std::filesystem::path& out_cnf);

/// Path of the unnormalized CNF that preprocess writes beside `out_cnf`.
std::filesystem::path original_cnf_path(const std::filesystem::path& out_cnf);

struct Report {
  std::vector<BenchRecord> rows;
  std::size_t averaged = 0;
  std::optional<double> mean_speed_up;
  std::optional<double> mean_speed_up_with_norm;
};

/// Recomputes both speed-up columns from the raw times. Means are over rows
/// whose verdict is neither TIMEOUT nor ERROR and whose speed-ups exist.
Report make_report(std::vector<BenchRecord> records);
std::string format_report_table(const Report& report);

}  // namespace ol
