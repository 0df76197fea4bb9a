#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ol/formula.hpp"
#include "ol/formula_io.hpp"

namespace ol {

/// AIGER literal: 2 * variable + negation bit. 0 is false, 1 is true.
using AigLit = std::uint32_t;

constexpr AigLit aig_not(AigLit l) { return l ^ 1U; }
constexpr std::uint32_t aig_var(AigLit l) { return l >> 1; }
constexpr bool aig_negated(AigLit l) { return l & 1U; }

struct AigGate {
  AigLit lhs;
  AigLit rhs0;
  AigLit rhs1;
  friend bool operator==(const AigGate&, const AigGate&) = default;
};

/// Combinational And-Inverter Graph. Gates are in topological order.
struct AigCircuit {
  std::uint32_t max_var = 0;
  std::vector<AigLit> inputs;
  std::vector<AigGate> gates;
  std::vector<AigLit> outputs;
  /// Symbol table lines without the kind prefix, e.g. {'i', 0, "a"}.
  struct Symbol {
    char kind;
    std::uint32_t index;
    std::string name;
    friend bool operator==(const Symbol&, const Symbol&) = default;
  };
  std::vector<Symbol> symbols;
  std::vector<std::string> comments;

  std::size_t num_inputs() const { return inputs.size(); }
  std::size_t num_gates() const { return gates.size(); }
  friend bool operator==(const AigCircuit&, const AigCircuit&) = default;
};

/// Parses ASCII AIGER ("aag"). Latches are rejected. Errors are ParseError
/// with the offending line (column 1).
AigCircuit parse_aag(std::string_view text);

/// Parses binary AIGER ("aig"); the same restrictions apply.
AigCircuit parse_aig(std::string_view bytes);

/// Dispatches on the header: "aag" or "aig".
AigCircuit parse_aiger(std::string_view data);

std::string emit_aag(const AigCircuit& c);

/// Standard evaluation; one value per input in order.
std::vector<bool> simulate(const AigCircuit& c, const std::vector<bool>& inputs);

/// Input names used by cone_formula: i0, i1, ...
std::string input_name(std::size_t i);

/// Formula of one output over i0..i(I-1). Gate sharing becomes DAG sharing.
FormulaId cone_formula(FormulaStore& store, const AigCircuit& c, std::size_t output);

/// Number of And gates in the cone of one output.
std::size_t cone_size(const AigCircuit& c, std::size_t output);

/// Circuit with one output per root. Inputs follow `input_names` (sorted
/// variables of the roots when empty). Or becomes ¬(¬a∧¬b), ⊤/⊥ become
/// literals 1/0, structurally equal gates are shared.
AigCircuit formulas_to_circuit(const FormulaStore& store, std::span<const FormulaId> roots,
                               std::vector<std::string> input_names = {});
AigCircuit formula_to_circuit(const FormulaStore& store, FormulaId f, std::vector<std::string> input_names = {});

/// Incremental AIG construction with structural hashing and constant folding.
class AigBuilder {
 public:
  /// With `simplify` off only constants and structural hashing are folded, so every
  /// distinct binary connective keeps its own gate.
  explicit AigBuilder(bool simplify = true) : simplify_(simplify) {}
  AigLit input(std::string name = {});
  AigLit and_gate(AigLit a, AigLit b);
  AigLit or_gate(AigLit a, AigLit b) { return aig_not(and_gate(aig_not(a), aig_not(b))); }
  AigLit xor_gate(AigLit a, AigLit b) { return or_gate(and_gate(a, aig_not(b)), and_gate(aig_not(a), b)); }
  AigLit mux(AigLit s, AigLit t, AigLit e) { return or_gate(and_gate(s, t), and_gate(aig_not(s), e)); }
  void output(AigLit l, std::string name = {});
  AigCircuit finish(std::vector<std::string> comments = {}) const;

 private:
  AigCircuit c_;
  std::unordered_map<std::uint64_t, AigLit> strash_;
  bool simplify_;
};

/// n-bit ripple-carry adder: inputs a0..a(n-1), b0..b(n-1); outputs s0..sn.
AigCircuit ripple_carry_adder(unsigned bits);

/// n-bit unsigned array multiplier built from ripple-carry rows; 2n outputs.
AigCircuit array_multiplier(unsigned bits);

struct CnfInstance {
  std::uint32_t num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<std::string> comments;
  friend bool operator==(const CnfInstance&, const CnfInstance&) = default;
};

/// Tseitin encoding. Variables 1..V are the inputs sorted by name, then one
/// per distinct And/Or node in topological order. A constant allocates one
/// extra variable forced true by a unit clause. When `assert_roots` holds,
/// every root is asserted by a unit clause.
CnfInstance tseitin(const FormulaStore& store, std::span<const FormulaId> roots, bool assert_roots = true);
CnfInstance tseitin(const FormulaStore& store, FormulaId f, bool assert_root = true);

/// CNF that is unsatisfiable iff f and g are classically equivalent.
/// Inputs are shared. Internal nodes get separate variables per side unless
/// `share_subterms`. The variables of g must occur in f.
CnfInstance miter_cnf(const FormulaStore& store, FormulaId f, FormulaId g, bool share_subterms = false);

std::string emit_dimacs(const CnfInstance& cnf);
CnfInstance parse_dimacs(std::string_view text);

/// Plain DPLL with unit propagation, branching on variables in ascending
/// order (so the inputs of a Tseitin CNF are enumerated first). Meant for
/// small instances in tests and self-checks. Fills `model` (index = variable)
/// when satisfiable.
bool dpll_satisfiable(const CnfInstance& cnf, std::vector<bool>* model = nullptr);

}  // namespace ol
