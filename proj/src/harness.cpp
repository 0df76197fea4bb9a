#include "ol/harness.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "ol/circuits.hpp"
#include "ol/normalizer.hpp"

namespace ol {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

bool is_executable(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::optional<SolverVerdict> status_line_verdict(std::string_view out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    auto end = out.find('\n', pos);
    if (end == std::string_view::npos) end = out.size();
    auto line = out.substr(pos, end - pos);
    pos = end + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line == "s SATISFIABLE") return SolverVerdict::Sat;
    if (line == "s UNSATISFIABLE") return SolverVerdict::Unsat;
  }
  return std::nullopt;
}

std::vector<std::string> input_names(const AigCircuit& c) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < c.num_inputs(); ++i) names.push_back(input_name(i));
  return names;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <class T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return fmt_double(*v);
  else
    return std::to_string(*v);
}

BenchRecord bench_bit(const AigCircuit& c, const std::string& name, std::int64_t bit, const GenBenchOptions& opt) {
  BenchRecord r;
  r.problem = name;
  r.bit = bit;
  if (bit < 0 || static_cast<std::size_t>(bit) >= c.outputs.size())
    throw std::out_of_range("bit " + std::to_string(bit) + " out of range (" + std::to_string(c.outputs.size()) +
                            " outputs)");
  FormulaStore store;
  const auto names = input_names(c);
  const FormulaId phi = cone_formula(store, c, static_cast<std::size_t>(bit));

  auto t0 = Clock::now();
  Normalizer norm(store);
  const FormulaId nf = norm.normalize(phi);
  r.ol_norm_ms = ms_since(t0);

  const auto cone = formula_to_circuit(store, phi, names);
  const auto nfc = formula_to_circuit(store, nf, names);
  r.size_orig = cone.num_gates();
  r.size_nf = nfc.num_gates();

  ProverOptions popt;
  popt.limits = opt.prove_limits;
  popt.record_derivations = false;
  t0 = Clock::now();
  try {
    r.engine_proved = prove(store, phi, nf, {}, popt).proved;
    r.ol_prove_ms = ms_since(t0);
    if (!r.engine_proved) r.error = "engine did not prove cone |- normal form";
  } catch (const LimitExceeded&) {
    r.error = "engine limit exceeded";
  }

  const std::string stem = name + "_bit" + std::to_string(bit);
  write_text(opt.out_dir / (stem + ".aag"), emit_aag(cone));
  write_text(opt.out_dir / (stem + ".nf.aag"), emit_aag(nfc));
  auto miter = miter_cnf(store, phi, nf);
  miter.comments.insert(miter.comments.begin(), "miter " + stem + " cone vs normal form");
  const auto cnf_path = opt.out_dir / (stem + ".miter.cnf");
  write_text(cnf_path, emit_dimacs(miter));

  if (opt.solver) {
    const auto res = run_external_solver(cnf_path, *opt.solver);
    r.solver_verdict = res.verdict;
    r.solver_ms_orig = res.wall_ms;
    if (res.verdict == SolverVerdict::Error && r.error.empty()) r.error = res.stderr_text;
  }
  return r;
}

}  // namespace

std::string_view solver_verdict_name(SolverVerdict v) {
  switch (v) {
    case SolverVerdict::Sat: return "SAT";
    case SolverVerdict::Unsat: return "UNSAT";
    case SolverVerdict::Timeout: return "TIMEOUT";
    case SolverVerdict::Error: return "ERROR";
  }
  return "?";
}

std::optional<SolverVerdict> parse_solver_verdict(std::string_view s) {
  for (auto v : {SolverVerdict::Sat, SolverVerdict::Unsat, SolverVerdict::Timeout, SolverVerdict::Error})
    if (s == solver_verdict_name(v)) return v;
  return std::nullopt;
}

std::optional<std::string> resolve_executable(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    if (is_executable(name)) return name;
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string_view rest(path);
  while (true) {
    auto colon = rest.find(':');
    auto dir = rest.substr(0, colon);
    auto candidate = std::filesystem::path(dir.empty() ? "." : std::string(dir)) / name;
    if (is_executable(candidate)) return candidate.string();
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return std::nullopt;
}

std::optional<std::string> find_solver() {
  if (const char* env = std::getenv("ORTHO_SAT_SOLVER"); env && *env) return resolve_executable(env);
  for (const char* name : {"kissat", "cadical", "minisat"})
    if (auto p = resolve_executable(name)) return p;
  return std::nullopt;
}

SolverResult run_external_solver(const std::filesystem::path& cnf, const SolverConfig& config) {
  SolverResult res;
  const auto exe = resolve_executable(config.path);
  if (!exe) {
    res.stderr_text = "solver executable not found: '" + config.path + "'";
    return res;
  }
  std::vector<std::string> args{*exe};
  args.insert(args.end(), config.extra_args.begin(), config.extra_args.end());
  args.push_back(cnf.string());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  int out[2], err[2];
  if (::pipe2(out, O_CLOEXEC) != 0) {
    res.stderr_text = "pipe failed";
    return res;
  }
  if (::pipe2(err, O_CLOEXEC) != 0) {
    ::close(out[0]);
    ::close(out[1]);
    res.stderr_text = "pipe failed";
    return res;
  }

  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::milliseconds(std::max<std::int64_t>(config.timeout_ms, 0));
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {out[0], out[1], err[0], err[1]}) ::close(fd);
    res.stderr_text = "fork failed";
    return res;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out[1], STDOUT_FILENO);
    ::dup2(err[1], STDERR_FILENO);
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(out[1]);
  ::close(err[1]);

  bool timed_out = false;
  pollfd fds[2] = {{out[0], POLLIN, 0}, {err[0], POLLIN, 0}};
  std::string* sinks[2] = {&res.stdout_text, &res.stderr_text};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    const auto now = Clock::now();
    const auto left = std::chrono::ceil<std::chrono::milliseconds>(deadline - now).count();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    int n = ::poll(fds, 2, static_cast<int>(std::min<std::int64_t>(left, 1000)));
    if (n < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      auto got = ::read(fds[i].fd, buf, sizeof buf);
      if (got > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || errno != EINTR) {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }

  int status = 0;
  while (!timed_out) {
    pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (Clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
  }
  for (auto& f : fds)
    if (f.fd >= 0) ::close(f.fd);
  res.wall_ms = ms_since(t0);

  if (timed_out) {
    res.verdict = SolverVerdict::Timeout;
    return res;
  }
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  if (auto v = status_line_verdict(res.stdout_text)) {
    res.verdict = *v;
  } else if (res.exit_code == 10) {
    res.verdict = SolverVerdict::Sat;
  } else if (res.exit_code == 20) {
    res.verdict = SolverVerdict::Unsat;
  } else {
    res.verdict = SolverVerdict::Error;
    if (res.exit_code == 127 && res.stderr_text.empty()) res.stderr_text = "exec failed for '" + *exe + "'";
    if (res.stderr_text.empty()) res.stderr_text = "no status line (exit code " + std::to_string(res.exit_code) + ")";
  }
  return res;
}

std::string bench_csv_row(const BenchRecord& r) {
  std::string s = r.problem + "," + std::to_string(r.bit) + "," + opt_field(r.size_orig) + "," +
                  opt_field(r.size_nf) + "," + opt_field(r.ol_norm_ms) + "," + opt_field(r.ol_prove_ms) + ",";
  if (r.solver_verdict) s += solver_verdict_name(*r.solver_verdict);
  s += "," + opt_field(r.solver_ms_orig) + "," + opt_field(r.solver_ms_nf) + "," + opt_field(r.speed_up) + "," +
       opt_field(r.speed_up_with_norm);
  return s;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::string s(kBenchCsvHeader);
  s += '\n';
  for (const auto& r : records) s += bench_csv_row(r) + '\n';
  return s;
}

std::vector<BenchRecord> parse_bench_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kBenchCsvHeader) throw ParseError("unexpected CSV header", line_no, 1);
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 11)
      throw ParseError("row has " + std::to_string(f.size()) + " fields, expected 11", line_no, 1);
    auto column_of = [&](std::size_t k) {
      std::size_t col = 1;
      for (std::size_t i = 0; i < k; ++i) col += f[i].size() + 1;
      return col;
    };
    auto bad = [&](std::size_t k, const char* what) -> ParseError {
      return ParseError(std::string("bad ") + what + " '" + std::string(f[k]) + "'", line_no, column_of(k));
    };
    auto as_double = [&](std::size_t k, const char* what) -> std::optional<double> {
      if (f[k].empty()) return std::nullopt;
      double v = 0;
      auto [p, ec] = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v);
      if (ec != std::errc() || p != f[k].data() + f[k].size()) throw bad(k, what);
      return v;
    };
    auto as_count = [&](std::size_t k, const char* what) -> std::optional<std::uint64_t> {
      if (f[k].empty()) return std::nullopt;
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v);
      if (ec != std::errc() || p != f[k].data() + f[k].size()) throw bad(k, what);
      return v;
    };
    BenchRecord r;
    r.problem = std::string(f[0]);
    if (r.problem.empty()) throw bad(0, "problem");
    {
      auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.bit);
      if (f[1].empty() || ec != std::errc() || p != f[1].data() + f[1].size()) throw bad(1, "bit");
    }
    r.size_orig = as_count(2, "size_orig");
    r.size_nf = as_count(3, "size_nf");
    r.ol_norm_ms = as_double(4, "ol_norm_ms");
    r.ol_prove_ms = as_double(5, "ol_prove_ms");
    if (!f[6].empty()) {
      r.solver_verdict = parse_solver_verdict(f[6]);
      if (!r.solver_verdict) throw bad(6, "solver_verdict");
    }
    r.solver_ms_orig = as_double(7, "solver_ms_orig");
    r.solver_ms_nf = as_double(8, "solver_ms_nf");
    r.speed_up = as_double(9, "speed_up");
    r.speed_up_with_norm = as_double(10, "speed_up_with_norm");
    for (std::size_t k : {4, 5, 7, 8}) {
      auto v = as_double(k, "time");
      if (v && *v < 0) throw bad(k, "negative time");
    }
    out.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("missing CSV header", 1, 1);
  return out;
}

double speed_up(double orig_ms, double nf_ms) { return orig_ms / nf_ms - 1.0; }

double speed_up_with_norm(double orig_ms, double nf_ms, double norm_ms) {
  return orig_ms / (nf_ms + norm_ms) - 1.0;
}

std::vector<BenchRecord> gen_bench(const std::filesystem::path& aig_path, const GenBenchOptions& options) {
  const AigCircuit c = parse_aiger(read_text(aig_path));
  const std::string name = aig_path.stem().string();
  std::vector<std::int64_t> bits = options.bits;
  if (bits.empty())
    for (std::size_t i = 0; i < c.outputs.size(); ++i) bits.push_back(static_cast<std::int64_t>(i));
  std::filesystem::create_directories(options.out_dir);

  std::vector<BenchRecord> records(bits.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < bits.size();) {
      try {
        records[i] = bench_bit(c, name, bits[i], options);
      } catch (const std::exception& e) {
        BenchRecord r;
        r.problem = name;
        r.bit = bits[i];
        r.solver_verdict = SolverVerdict::Error;
        r.error = e.what();
        records[i] = std::move(r);
      }
    }
  };
  const unsigned jobs = std::clamp<unsigned>(options.jobs, 1, static_cast<unsigned>(std::max<std::size_t>(bits.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.bit < b.bit; });
  return records;
}

std::filesystem::path original_cnf_path(const std::filesystem::path& out_cnf) {
  auto p = out_cnf;
  if (p.extension() == ".cnf") p.replace_extension();
  p += ".orig.cnf";
  return p;
}

PreprocessResult preprocess(const std::filesystem::path& aig_path, const std::filesystem::path& out_cnf) {
  const AigCircuit c = parse_aiger(read_text(aig_path));
  FormulaStore store;
  const auto names = input_names(c);
  std::vector<FormulaId> cones, nfs;
  for (std::size_t k = 0; k < c.outputs.size(); ++k) cones.push_back(cone_formula(store, c, k));

  PreprocessResult res;
  const auto t0 = Clock::now();
  Normalizer norm(store);
  for (auto f : cones) nfs.push_back(norm.normalize(f));
  res.norm_ms = ms_since(t0);

  res.size_orig = formulas_to_circuit(store, cones, names).num_gates();
  res.size_nf = formulas_to_circuit(store, nfs, names).num_gates();

  auto cnf_nf = tseitin(store, nfs, true);
  auto cnf_orig = tseitin(store, cones, true);
  cnf_nf.comments.insert(cnf_nf.comments.begin(), "normalized " + aig_path.filename().string());
  cnf_orig.comments.insert(cnf_orig.comments.begin(), "original " + aig_path.filename().string());
  res.vars_nf = cnf_nf.num_vars;
  res.vars_orig = cnf_orig.num_vars;
  res.cnf_nf = out_cnf;
  res.cnf_orig = original_cnf_path(out_cnf);
  if (out_cnf.has_parent_path()) std::filesystem::create_directories(out_cnf.parent_path());
  write_text(res.cnf_nf, emit_dimacs(cnf_nf));
  write_text(res.cnf_orig, emit_dimacs(cnf_orig));
  return res;
}

Report make_report(std::vector<BenchRecord> records) {
  Report rep;
  double sum = 0, sum_norm = 0;
  std::size_t n_norm = 0;
  for (auto& r : records) {
    r.speed_up.reset();
    r.speed_up_with_norm.reset();
    if (r.solver_ms_orig && r.solver_ms_nf && *r.solver_ms_nf > 0) {
      r.speed_up = speed_up(*r.solver_ms_orig, *r.solver_ms_nf);
      if (r.ol_norm_ms) r.speed_up_with_norm = speed_up_with_norm(*r.solver_ms_orig, *r.solver_ms_nf, *r.ol_norm_ms);
    }
    const bool excluded = r.solver_verdict &&
                          (*r.solver_verdict == SolverVerdict::Timeout || *r.solver_verdict == SolverVerdict::Error);
    if (excluded) continue;
    if (r.speed_up) {
      sum += *r.speed_up;
      ++rep.averaged;
    }
    if (r.speed_up_with_norm) {
      sum_norm += *r.speed_up_with_norm;
      ++n_norm;
    }
  }
  if (rep.averaged) rep.mean_speed_up = sum / static_cast<double>(rep.averaged);
  if (n_norm) rep.mean_speed_up_with_norm = sum_norm / static_cast<double>(n_norm);
  rep.rows = std::move(records);
  return rep;
}

std::string format_report_table(const Report& report) {
  const char* heads[] = {"problem", "bit", "solver_ms_orig", "solver_ms_nf", "ol_norm_ms", "verdict", "speed_up",
                         "speed_up_with_norm"};
  std::vector<std::vector<std::string>> cells;
  auto num = [](const std::optional<double>& v, const char* f) {
    if (!v) return std::string("-");
    char buf[64];
    std::snprintf(buf, sizeof buf, f, *v);
    return std::string(buf);
  };
  for (const auto& r : report.rows) {
    cells.push_back({r.problem, std::to_string(r.bit), num(r.solver_ms_orig, "%.1f"), num(r.solver_ms_nf, "%.1f"),
                     num(r.ol_norm_ms, "%.1f"),
                     r.solver_verdict ? std::string(solver_verdict_name(*r.solver_verdict)) : "-",
                     num(r.speed_up, "%.4f"), num(r.speed_up_with_norm, "%.4f")});
  }
  std::size_t width[8];
  for (int k = 0; k < 8; ++k) {
    width[k] = std::string_view(heads[k]).size();
    for (const auto& row : cells) width[k] = std::max(width[k], row[k].size());
  }
  std::string out;
  auto emit = [&](const auto& row) {
    for (int k = 0; k < 8; ++k) {
      std::string cell(row[k]);
      // Problem names left-aligned, numbers right-aligned.
      if (k == 0)
        out += cell + std::string(width[k] - cell.size(), ' ');
      else
        out += std::string(width[k] - cell.size() + 2, ' ') + cell;
    }
    out += '\n';
  };
  emit(heads);
  for (const auto& row : cells) emit(row);
  out += "mean over " + std::to_string(report.averaged) + " rows: speed_up " + num(report.mean_speed_up, "%.4f") +
         ", speed_up_with_norm " + num(report.mean_speed_up_with_norm, "%.4f") + "\n";
  return out;
}

}  // namespace ol
