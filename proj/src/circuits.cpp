#include "ol/circuits.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace ol {

namespace {

// Line-oriented reader that remembers line numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_, 1); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::uint64_t> parse_numbers(const LineReader& r, std::string_view line, std::size_t expected,
                                         const char* what) {
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v);
    if (ec != std::errc() || (ptr != line.data() + line.size() && *ptr != ' '))
      r.fail(std::string("malformed ") + what + " '" + std::string(line) + "'");
    out.push_back(v);
    i = static_cast<std::size_t>(ptr - line.data());
  }
  if (out.size() != expected)
    r.fail(std::string(what) + " expects " + std::to_string(expected) + " numbers, got " + std::to_string(out.size()));
  return out;
}

struct Header {
  std::uint64_t m, i, l, o, a;
};

Header parse_header(LineReader& r, std::string_view magic) {
  std::string_view line;
  if (!r.next(line)) r.fail("empty input");
  if (line.substr(0, magic.size() + 1) != std::string(magic) + " ")
    r.fail("expected '" + std::string(magic) + " M I L O A' header");
  auto n = parse_numbers(r, line.substr(magic.size() + 1), 5, "header");
  Header h{n[0], n[1], n[2], n[3], n[4]};
  if (h.l > 0) r.fail("sequential circuits unsupported");
  if (h.m > 0x7FFFFFFE) r.fail("maximum variable index too large");
  if (h.i + h.a > h.m) r.fail("M is smaller than I + L + A");
  return h;
}

// Symbol table and comment section shared by both formats.
void parse_trailer(LineReader& r, AigCircuit& c) {
  std::string_view line;
  while (r.next(line)) {
    if (line == "c") {
      while (r.next(line)) c.comments.emplace_back(line);
      return;
    }
    if (line.empty()) continue;
    const char kind = line[0];
    if (kind != 'i' && kind != 'o' && kind != 'l') r.fail("unexpected line '" + std::string(line) + "'");
    if (kind == 'l') r.fail("latch symbol in a combinational circuit");
    const auto space = line.find(' ');
    if (space == std::string_view::npos || space == 1) r.fail("malformed symbol line");
    std::uint32_t idx = 0;
    auto [ptr, ec] = std::from_chars(line.data() + 1, line.data() + space, idx);
    if (ec != std::errc() || ptr != line.data() + space) r.fail("malformed symbol index");
    const auto limit = kind == 'i' ? c.inputs.size() : c.outputs.size();
    if (idx >= limit) r.fail("symbol index out of range");
    c.symbols.push_back({kind, idx, std::string(line.substr(space + 1))});
  }
}

void validate(const LineReader& r, const AigCircuit& c, std::vector<char>& defined, AigLit lit, const char* what) {
  if (aig_var(lit) > c.max_var) r.fail(std::string(what) + " literal " + std::to_string(lit) + " exceeds M");
  if (aig_var(lit) != 0 && !defined[aig_var(lit)])
    r.fail(std::string(what) + " literal " + std::to_string(lit) + " refers to an undefined variable");
}

}  // namespace

AigCircuit parse_aag(std::string_view text) {
  LineReader r(text);
  const auto h = parse_header(r, "aag");
  AigCircuit c;
  c.max_var = static_cast<std::uint32_t>(h.m);
  std::vector<char> defined(h.m + 1, 0);
  std::string_view line;
  for (std::uint64_t k = 0; k < h.i; ++k) {
    if (!r.next(line)) r.fail("missing input line");
    const auto lit = static_cast<AigLit>(parse_numbers(r, line, 1, "input")[0]);
    if (aig_negated(lit) || lit < 2) r.fail("input literal must be even and non-constant");
    if (aig_var(lit) > c.max_var) r.fail("input literal exceeds M");
    if (defined[aig_var(lit)]) r.fail("variable defined twice");
    defined[aig_var(lit)] = 1;
    c.inputs.push_back(lit);
  }
  std::vector<std::pair<AigLit, std::size_t>> outputs;
  for (std::uint64_t k = 0; k < h.o; ++k) {
    if (!r.next(line)) r.fail("missing output line");
    outputs.emplace_back(static_cast<AigLit>(parse_numbers(r, line, 1, "output")[0]), r.line_no());
  }
  const AigLit max_input = c.inputs.empty() ? 0 : *std::max_element(c.inputs.begin(), c.inputs.end());
  for (std::uint64_t k = 0; k < h.a; ++k) {
    if (!r.next(line)) r.fail("missing and-gate line");
    auto n = parse_numbers(r, line, 3, "and gate");
    AigGate g{static_cast<AigLit>(n[0]), static_cast<AigLit>(n[1]), static_cast<AigLit>(n[2])};
    if (aig_negated(g.lhs) || g.lhs < 2) r.fail("gate output literal must be even and non-constant");
    if (g.lhs <= max_input) r.fail("gate output literal must exceed every input literal");
    if (aig_var(g.lhs) > c.max_var) r.fail("gate output literal exceeds M");
    if (defined[aig_var(g.lhs)]) r.fail("variable defined twice");
    validate(r, c, defined, g.rhs0, "gate input");
    validate(r, c, defined, g.rhs1, "gate input");
    defined[aig_var(g.lhs)] = 1;
    c.gates.push_back(g);
  }
  for (auto [lit, line_no] : outputs) {
    if (aig_var(lit) > c.max_var || (aig_var(lit) != 0 && !defined[aig_var(lit)]))
      throw ParseError("output literal " + std::to_string(lit) + " is undefined", line_no, 1);
    c.outputs.push_back(lit);
  }
  parse_trailer(r, c);
  return c;
}

AigCircuit parse_aig(std::string_view bytes) {
  LineReader r(bytes);
  const auto h = parse_header(r, "aig");
  AigCircuit c;
  c.max_var = static_cast<std::uint32_t>(h.m);
  for (std::uint64_t k = 0; k < h.i; ++k) c.inputs.push_back(static_cast<AigLit>(2 * (k + 1)));
  std::string_view line;
  for (std::uint64_t k = 0; k < h.o; ++k) {
    if (!r.next(line)) r.fail("missing output line");
    c.outputs.push_back(static_cast<AigLit>(parse_numbers(r, line, 1, "output")[0]));
  }
  std::size_t pos = r.pos();
  auto decode = [&]() -> std::uint32_t {
    std::uint32_t x = 0;
    for (int shift = 0;; shift += 7) {
      if (pos >= bytes.size()) r.fail("truncated binary and-gate section");
      if (shift > 28) r.fail("oversized delta in binary and-gate section");
      const auto ch = static_cast<unsigned char>(bytes[pos++]);
      x |= static_cast<std::uint32_t>(ch & 0x7F) << shift;
      if (!(ch & 0x80)) return x;
    }
  };
  for (std::uint64_t k = 0; k < h.a; ++k) {
    const AigLit lhs = static_cast<AigLit>(2 * (h.i + k + 1));
    const auto d0 = decode();
    if (d0 == 0 || d0 > lhs) r.fail("invalid delta in binary and-gate section");
    const AigLit rhs0 = lhs - d0;
    const auto d1 = decode();
    if (d1 > rhs0) r.fail("invalid delta in binary and-gate section");
    c.gates.push_back({lhs, rhs0, rhs0 - d1});
  }
  for (auto o : c.outputs)
    if (aig_var(o) > c.max_var) r.fail("output literal exceeds M");
  // The symbol section starts right after the last gate byte.
  std::size_t consumed_lines = r.line_no();
  LineReader tail(bytes.substr(pos));
  try {
    parse_trailer(tail, c);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), consumed_lines + e.line(), 1);
  }
  return c;
}

AigCircuit parse_aiger(std::string_view data) {
  if (data.substr(0, 4) == "aag ") return parse_aag(data);
  if (data.substr(0, 4) == "aig ") return parse_aig(data);
  throw ParseError("unknown AIGER header", 1, 1);
}

std::string emit_aag(const AigCircuit& c) {
  std::ostringstream out;
  out << "aag " << c.max_var << ' ' << c.inputs.size() << " 0 " << c.outputs.size() << ' ' << c.gates.size() << '\n';
  for (auto i : c.inputs) out << i << '\n';
  for (auto o : c.outputs) out << o << '\n';
  for (const auto& g : c.gates) out << g.lhs << ' ' << g.rhs0 << ' ' << g.rhs1 << '\n';
  for (const auto& s : c.symbols) out << s.kind << s.index << ' ' << s.name << '\n';
  if (!c.comments.empty()) {
    out << "c\n";
    for (const auto& line : c.comments) out << line << '\n';
  }
  return out.str();
}

std::vector<bool> simulate(const AigCircuit& c, const std::vector<bool>& inputs) {
  if (inputs.size() != c.inputs.size())
    throw std::invalid_argument("simulate: expected " + std::to_string(c.inputs.size()) + " input values, got " +
                                std::to_string(inputs.size()));
  std::vector<char> value(c.max_var + 1, 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) value[aig_var(c.inputs[i])] = inputs[i];
  auto lit = [&](AigLit l) { return static_cast<bool>(value[aig_var(l)]) != aig_negated(l); };
  for (const auto& g : c.gates) value[aig_var(g.lhs)] = lit(g.rhs0) && lit(g.rhs1);
  std::vector<bool> out;
  for (auto o : c.outputs) out.push_back(lit(o));
  return out;
}

std::string input_name(std::size_t i) { return "i" + std::to_string(i); }

namespace {

std::vector<char> cone_mask(const AigCircuit& c, std::size_t output) {
  if (output >= c.outputs.size())
    throw std::out_of_range("output index " + std::to_string(output) + " out of range (circuit has " +
                            std::to_string(c.outputs.size()) + " outputs)");
  std::vector<char> need(c.max_var + 1, 0);
  need[aig_var(c.outputs[output])] = 1;
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    if (!need[aig_var(it->lhs)]) continue;
    need[aig_var(it->rhs0)] = 1;
    need[aig_var(it->rhs1)] = 1;
  }
  return need;
}

}  // namespace

std::size_t cone_size(const AigCircuit& c, std::size_t output) {
  auto need = cone_mask(c, output);
  return static_cast<std::size_t>(
      std::count_if(c.gates.begin(), c.gates.end(), [&](const AigGate& g) { return need[aig_var(g.lhs)]; }));
}

FormulaId cone_formula(FormulaStore& store, const AigCircuit& c, std::size_t output) {
  auto need = cone_mask(c, output);
  std::vector<FormulaId> node(c.max_var + 1);
  node[0] = store.bot();
  for (std::size_t i = 0; i < c.inputs.size(); ++i)
    if (need[aig_var(c.inputs[i])]) node[aig_var(c.inputs[i])] = store.var(input_name(i));
  auto lit = [&](AigLit l) {
    if (l == 0) return store.bot();
    if (l == 1) return store.top();
    const auto f = node[aig_var(l)];
    return aig_negated(l) ? store.make_not(f) : f;
  };
  for (const auto& g : c.gates)
    if (need[aig_var(g.lhs)]) node[aig_var(g.lhs)] = store.make_and(lit(g.rhs0), lit(g.rhs1));
  return lit(c.outputs[output]);
}

AigLit AigBuilder::input(std::string name) {
  if (!c_.gates.empty()) throw std::logic_error("AigBuilder: inputs must be created before gates");
  const AigLit l = 2 * (++c_.max_var);
  if (!name.empty()) c_.symbols.push_back({'i', static_cast<std::uint32_t>(c_.inputs.size()), std::move(name)});
  c_.inputs.push_back(l);
  return l;
}

AigLit AigBuilder::and_gate(AigLit a, AigLit b) {
  if (a > b) std::swap(a, b);
  if (a == 0) return 0;
  if (a == 1) return b;
  if (simplify_ && a == b) return a;
  if (simplify_ && a == aig_not(b)) return 0;
  const std::uint64_t key = (std::uint64_t{b} << 32) | a;
  if (auto it = strash_.find(key); it != strash_.end()) return it->second;
  const AigLit l = 2 * (++c_.max_var);
  c_.gates.push_back({l, b, a});
  strash_.emplace(key, l);
  return l;
}

void AigBuilder::output(AigLit l, std::string name) {
  if (!name.empty()) c_.symbols.push_back({'o', static_cast<std::uint32_t>(c_.outputs.size()), std::move(name)});
  c_.outputs.push_back(l);
}

AigCircuit AigBuilder::finish(std::vector<std::string> comments) const {
  AigCircuit c = c_;
  // Input symbols first, then output symbols, as emitted by most tools.
  std::stable_sort(c.symbols.begin(), c.symbols.end(),
                   [](const auto& x, const auto& y) { return x.kind == 'i' && y.kind != 'i'; });
  c.comments = std::move(comments);
  return c;
}

AigCircuit formulas_to_circuit(const FormulaStore& store, std::span<const FormulaId> roots,
                               std::vector<std::string> input_names) {
  if (input_names.empty()) input_names = variables(store, roots);
  AigBuilder b(false);
  std::unordered_map<std::string, AigLit> input_lit;
  for (const auto& name : input_names) {
    if (input_lit.count(name)) throw std::invalid_argument("duplicate input name '" + name + "'");
    input_lit.emplace(name, b.input(name));
  }
  std::unordered_map<std::uint32_t, AigLit> lit;
  for (auto g : topo_order(store, roots)) {
    const auto& n = store.node(g);
    AigLit l = 0;
    switch (n.kind) {
      case Kind::Var: {
        auto it = input_lit.find(store.name(g));
        if (it == input_lit.end()) throw std::invalid_argument("variable '" + store.name(g) + "' is not an input");
        l = it->second;
        break;
      }
      case Kind::Top: l = 1; break;
      case Kind::Bot: l = 0; break;
      case Kind::Not: l = aig_not(lit.at(n.left.value)); break;
      case Kind::And: l = b.and_gate(lit.at(n.left.value), lit.at(n.right.value)); break;
      case Kind::Or: l = b.or_gate(lit.at(n.left.value), lit.at(n.right.value)); break;
    }
    lit.emplace(g.value, l);
  }
  for (auto r : roots) b.output(lit.at(r.value));
  return b.finish();
}

AigCircuit formula_to_circuit(const FormulaStore& store, FormulaId f, std::vector<std::string> input_names) {
  const FormulaId roots[] = {f};
  return formulas_to_circuit(store, roots, std::move(input_names));
}

AigCircuit ripple_carry_adder(unsigned bits) {
  AigBuilder b;
  std::vector<AigLit> a, c;
  for (unsigned i = 0; i < bits; ++i) a.push_back(b.input("a" + std::to_string(i)));
  for (unsigned i = 0; i < bits; ++i) c.push_back(b.input("b" + std::to_string(i)));
  AigLit carry = 0;
  for (unsigned i = 0; i < bits; ++i) {
    const auto t = b.xor_gate(a[i], c[i]);
    b.output(b.xor_gate(t, carry), "s" + std::to_string(i));
    carry = b.or_gate(b.and_gate(a[i], c[i]), b.and_gate(t, carry));
  }
  b.output(carry, "s" + std::to_string(bits));
  return b.finish({std::to_string(bits) + "-bit ripple-carry adder"});
}

AigCircuit array_multiplier(unsigned bits) {
  AigBuilder b;
  std::vector<AigLit> x, y;
  for (unsigned i = 0; i < bits; ++i) x.push_back(b.input("a" + std::to_string(i)));
  for (unsigned i = 0; i < bits; ++i) y.push_back(b.input("b" + std::to_string(i)));
  // acc holds the running sum of partial products, 2*bits wide.
  std::vector<AigLit> acc(2 * bits, 0);
  for (unsigned j = 0; j < bits; ++j) {
    AigLit carry = 0;
    for (unsigned i = 0; i < bits; ++i) {
      const auto pp = b.and_gate(x[i], y[j]);
      const auto k = i + j;
      const auto t = b.xor_gate(acc[k], pp);
      const auto sum = b.xor_gate(t, carry);
      carry = b.or_gate(b.and_gate(acc[k], pp), b.and_gate(t, carry));
      acc[k] = sum;
    }
    acc[j + bits] = carry;
  }
  for (unsigned k = 0; k < 2 * bits; ++k) b.output(acc[k], "p" + std::to_string(k));
  return b.finish({std::to_string(bits) + "x" + std::to_string(bits) + " array multiplier"});
}

// ---------------------------------------------------------------------------
// Clausification

namespace {

class TseitinEncoder {
 public:
  TseitinEncoder(const FormulaStore& store, CnfInstance& cnf, const std::vector<std::string>& inputs)
      : store_(store), cnf_(cnf) {
    for (const auto& name : inputs) input_var_.emplace(name, static_cast<int>(++cnf_.num_vars));
  }

  int true_literal() {
    if (truth_ == 0) {
      truth_ = static_cast<int>(++cnf_.num_vars);
      cnf_.clauses.push_back({truth_});
    }
    return truth_;
  }

  int encode(FormulaId root) {
    const FormulaId roots[] = {root};
    for (auto g : topo_order(store_, roots)) {
      if (lit_.count(g.value)) continue;
      const auto& n = store_.node(g);
      int l = 0;
      switch (n.kind) {
        case Kind::Var: {
          auto it = input_var_.find(store_.name(g));
          if (it == input_var_.end()) throw std::invalid_argument("variable '" + store_.name(g) + "' is not an input");
          l = it->second;
          break;
        }
        case Kind::Top: l = true_literal(); break;
        case Kind::Bot: l = -true_literal(); break;
        case Kind::Not: l = -lit_.at(n.left.value); break;
        case Kind::And:
        case Kind::Or: {
          const int a = lit_.at(n.left.value), b = lit_.at(n.right.value);
          l = static_cast<int>(++cnf_.num_vars);
          if (n.kind == Kind::And) {
            add({-l, a});
            add({-l, b});
            add({l, -a, -b});
          } else {
            add({l, -a});
            add({l, -b});
            add({-l, a, b});
          }
          break;
        }
      }
      lit_.emplace(g.value, l);
    }
    return lit_.at(root.value);
  }

  // Drops repeated literals; a clause with x and -x is kept as is.
  void add(std::vector<int> clause) {
    std::vector<int> out;
    for (int l : clause)
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    cnf_.clauses.push_back(std::move(out));
  }

  void forget_internal() {
    for (auto it = lit_.begin(); it != lit_.end();) {
      const auto k = store_.kind(FormulaId{it->first});
      it = (k == Kind::And || k == Kind::Or || k == Kind::Not) ? lit_.erase(it) : std::next(it);
    }
  }

 private:
  const FormulaStore& store_;
  CnfInstance& cnf_;
  std::unordered_map<std::string, int> input_var_;
  std::unordered_map<std::uint32_t, int> lit_;
  int truth_ = 0;
};

}  // namespace

CnfInstance tseitin(const FormulaStore& store, std::span<const FormulaId> roots, bool assert_roots) {
  CnfInstance cnf;
  const auto inputs = variables(store, roots);
  TseitinEncoder enc(store, cnf, inputs);
  cnf.comments.push_back("tseitin encoding, " + std::to_string(inputs.size()) + " inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i)
    cnf.comments.push_back("input " + std::to_string(i + 1) + " " + inputs[i]);
  std::vector<int> root_lits;
  for (auto r : roots) root_lits.push_back(enc.encode(r));
  for (std::size_t i = 0; i < root_lits.size(); ++i) {
    cnf.comments.push_back("root " + std::to_string(i) + " literal " + std::to_string(root_lits[i]));
    if (assert_roots) enc.add({root_lits[i]});
  }
  return cnf;
}

CnfInstance tseitin(const FormulaStore& store, FormulaId f, bool assert_root) {
  const FormulaId roots[] = {f};
  return tseitin(store, roots, assert_root);
}

CnfInstance miter_cnf(const FormulaStore& store, FormulaId f, FormulaId g, bool share_subterms) {
  const auto left_vars = variables(store, f);
  for (const auto& v : variables(store, g))
    if (!std::binary_search(left_vars.begin(), left_vars.end(), v))
      throw std::invalid_argument("miter: variable '" + v + "' of the right side does not occur on the left");
  CnfInstance cnf;
  TseitinEncoder enc(store, cnf, left_vars);
  cnf.comments.push_back(std::string("miter, ") + (share_subterms ? "shared" : "separate") + " internal variables");
  for (std::size_t i = 0; i < left_vars.size(); ++i)
    cnf.comments.push_back("input " + std::to_string(i + 1) + " " + left_vars[i]);
  const int p = enc.encode(f);
  if (!share_subterms) enc.forget_internal();
  const int q = enc.encode(g);
  cnf.comments.push_back("left root " + std::to_string(p) + ", right root " + std::to_string(q));
  enc.add({p, q});
  enc.add({-p, -q});
  return cnf;
}

std::string emit_dimacs(const CnfInstance& cnf) {
  std::string out;
  for (const auto& c : cnf.comments) out += "c " + c + "\n";
  out += "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& clause : cnf.clauses) {
    for (int l : clause) {
      out += std::to_string(l);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfInstance parse_dimacs(std::string_view text) {
  LineReader r(text);
  CnfInstance cnf;
  std::string_view line;
  bool header = false;
  std::size_t expected = 0;
  std::vector<int> current;
  while (r.next(line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      if (header) continue;
      auto body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.remove_prefix(1);
      cnf.comments.emplace_back(body);
      continue;
    }
    if (line[0] == 'p') {
      if (header) r.fail("duplicate problem line");
      std::istringstream in{std::string(line)};
      std::string p, kind;
      long long v = -1, c = -1;
      if (!(in >> p >> kind >> v >> c) || kind != "cnf" || v < 0 || c < 0) r.fail("malformed problem line");
      cnf.num_vars = static_cast<std::uint32_t>(v);
      expected = static_cast<std::size_t>(c);
      header = true;
      continue;
    }
    if (!header) r.fail("clause before the problem line");
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) {
      long long l = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), l);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) r.fail("malformed literal '" + tok + "'");
      if (l == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (static_cast<unsigned long long>(l < 0 ? -l : l) > cnf.num_vars) r.fail("literal exceeds variable count");
      current.push_back(static_cast<int>(l));
    }
  }
  if (!header) r.fail("missing problem line");
  if (!current.empty()) r.fail("unterminated final clause");
  if (cnf.clauses.size() != expected)
    r.fail("header announces " + std::to_string(expected) + " clauses, found " + std::to_string(cnf.clauses.size()));
  return cnf;
}

namespace {

class Dpll {
 public:
  explicit Dpll(const CnfInstance& cnf) : cnf_(cnf), value_(cnf.num_vars + 1, 0) {}

  bool solve() { return search(); }
  const std::vector<signed char>& values() const { return value_; }

 private:
  int eval(int l) const {
    const int v = value_[static_cast<std::size_t>(std::abs(l))];
    return l > 0 ? v : -v;
  }

  // Unit propagation to a fixpoint. Records assigned variables on the trail.
  bool propagate(std::vector<int>& trail) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& clause : cnf_.clauses) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : clause) {
          const int v = eval(l);
          if (v > 0) {
            sat = true;
            break;
          }
          if (v == 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          value_[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
          trail.push_back(std::abs(last));
          changed = true;
        }
      }
    }
    return true;
  }

  bool search() {
    std::vector<int> trail;
    if (!propagate(trail)) {
      for (int v : trail) value_[static_cast<std::size_t>(v)] = 0;
      return false;
    }
    std::size_t var = 1;
    while (var <= cnf_.num_vars && value_[var] != 0) ++var;
    if (var > cnf_.num_vars) return true;
    for (signed char phase : {static_cast<signed char>(-1), static_cast<signed char>(1)}) {
      value_[var] = phase;
      if (search()) return true;
      value_[var] = 0;
    }
    for (int v : trail) value_[static_cast<std::size_t>(v)] = 0;
    return false;
  }

  const CnfInstance& cnf_;
  std::vector<signed char> value_;
};

}  // namespace

bool dpll_satisfiable(const CnfInstance& cnf, std::vector<bool>* model) {
  for (const auto& c : cnf.clauses)
    if (c.empty()) return false;
  Dpll d(cnf);
  if (!d.solve()) return false;
  if (model) {
    model->assign(cnf.num_vars + 1, false);
    for (std::size_t v = 1; v <= cnf.num_vars; ++v) (*model)[v] = d.values()[v] > 0;
  }
  return true;
}

}  // namespace ol
