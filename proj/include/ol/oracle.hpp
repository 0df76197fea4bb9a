#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "ol/entailment.hpp"
#include "ol/formula.hpp"

namespace ol {

class DepthLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an oracle input exceeds its size guard.
class GuardExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class NaiveStrategy {
  /// Expand every sequent reachable by reading the rules backward from the
  /// goal, then mark sequents proven until nothing changes.
  Fixpoint,
  /// Depth-first search with the current branch blocked against revisits.
  PathSearch,
};

struct NaiveOptions {
  NaiveStrategy strategy = NaiveStrategy::Fixpoint;
  /// PathSearch only. 0 selects 2 * (|universe|^2 + 1).
  std::size_t depth_limit = 0;
  /// PathSearch only. Reuse verdicts across branches: successes always, failures only when
  /// the path check never fired on a sequent above them on the branch.
  bool cache = true;
};

struct NaiveStats {
  std::uint64_t calls = 0;      // path search: visits; fixpoint: sequents expanded
  std::size_t max_depth = 0;    // path search: deepest branch; fixpoint: rounds
};

/// Backward proof search over right-only sequents. At each goal the rule
/// instances are Hyp, Ax, both disjunction and conjunction decompositions,
/// Replace and cuts on axiom formulas. `goal` and `axioms` must come from
/// prepare_goal on the same store.
bool naive_prove(const FormulaStore& store, Sequent goal, const AxiomSet& axioms, const NaiveOptions& options = {},
                 NaiveStats* stats = nullptr);

/// Converts `lhs <= rhs` with prepare_goal and runs naive_prove.
bool naive_prove(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms = {},
                 const NaiveOptions& options = {}, NaiveStats* stats = nullptr);

inline constexpr std::size_t kMaxTautologyVars = 20;

/// True iff `f` evaluates to true under every assignment. At most 20 variables.
bool brute_force_tautology(const FormulaStore& store, FormulaId f);

/// Classical equivalence by exhaustive evaluation of f <-> g.
bool brute_force_equivalent(const FormulaStore& store, FormulaId f, FormulaId g);

/// Satisfiability by exhaustive evaluation.
bool brute_force_satisfiable(const FormulaStore& store, FormulaId f);

inline constexpr unsigned kMaxPoolVars = 3;
inline constexpr unsigned kMaxPoolConnectives = 9;

/// Name of the i-th pool variable.
std::string pool_var(unsigned i);

/// Streams every NNF formula over v0..v(vars-1) with at most `max_connectives`
/// tree connectives, level by level, in a fixed order. Literals are the only
/// leaves. The visitor returns false to stop early; the function returns the
/// number of formulas visited.
std::size_t enumerate_formulas(FormulaStore& store, unsigned vars, unsigned max_connectives,
                               const std::function<bool(FormulaId)>& visit);

/// Collects enumerate_formulas into a vector.
std::vector<FormulaId> formula_pool(FormulaStore& store, unsigned vars, unsigned max_connectives);

/// Number of formulas with exactly `connectives` tree connectives over `vars` variables.
std::uint64_t pool_level_size(unsigned vars, unsigned connectives);

/// Seeded random NNF formula over v0..v(vars-1) with exactly `connectives`
/// distinct And/Or nodes. The skeleton is drawn uniformly among binary trees
/// of that size; operators, variables and leaf polarities are uniform.
FormulaId random_formula(FormulaStore& store, std::uint64_t seed, unsigned vars, unsigned connectives);

}  // namespace ol
