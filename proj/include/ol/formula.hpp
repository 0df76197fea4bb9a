#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ol {

/// Dense identity of a hash-consed formula node. Two ids from the same store
/// are equal iff the formulas are structurally equal.
struct FormulaId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
  friend constexpr auto operator<=>(FormulaId, FormulaId) = default;
};

struct FormulaIdHash {
  std::size_t operator()(FormulaId f) const noexcept { return std::hash<std::uint32_t>{}(f.value); }
};

enum class Kind : std::uint8_t { Var, Not, And, Or, Top, Bot };

std::string_view kind_name(Kind k);

/// Raised when a node is interned with the wrong number of children.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation's precondition on its input formula is violated.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FormulaNode {
  Kind kind = Kind::Top;
  // Children for Not/And/Or; for Var, `left` indexes the name table.
  FormulaId left;
  FormulaId right;
  bool in_nnf = true;
  std::optional<FormulaId> cached_nnf;
  std::optional<FormulaId> cached_inverse;
};

/// Append-only arena of hash-consed formula nodes.
///
/// Interning is purely structural: `(not (not x))` is a distinct node from
/// `x`. Simplification happens only in nnf()/inverse() and the normalizer.
/// Single writer; concurrent readers are fine once interning has stopped.
class FormulaStore {
 public:
  FormulaStore() = default;
  FormulaStore(const FormulaStore&) = delete;
  FormulaStore& operator=(const FormulaStore&) = delete;
  FormulaStore(FormulaStore&&) = default;
  FormulaStore& operator=(FormulaStore&&) = default;

  /// Interns a non-variable node. Top/Bot take no children, Not one, And/Or two.
  FormulaId intern(Kind kind, std::span<const FormulaId> children = {});

  FormulaId var(std::string_view name);
  FormulaId top();
  FormulaId bot();
  FormulaId make_not(FormulaId f);
  FormulaId make_and(FormulaId a, FormulaId b);
  FormulaId make_or(FormulaId a, FormulaId b);

  std::optional<FormulaId> find_var(std::string_view name) const;

  const FormulaNode& node(FormulaId f) const { return nodes_.at(f.value); }
  Kind kind(FormulaId f) const { return node(f).kind; }
  FormulaId left(FormulaId f) const { return node(f).left; }
  FormulaId right(FormulaId f) const { return node(f).right; }
  /// Child of a Not node.
  FormulaId operand(FormulaId f) const { return node(f).left; }
  const std::string& name(FormulaId f) const;
  bool is_nnf(FormulaId f) const { return node(f).in_nnf; }
  bool is_literal(FormulaId f) const;
  bool contains(FormulaId f) const { return f.valid() && f.value < nodes_.size(); }

  std::size_t size() const { return nodes_.size(); }

  /// Negation normal form, memoized per node. Constants are folded under
  /// negation and double negations vanish.
  FormulaId nnf(FormulaId f);

  /// nnf(not f) for an NNF formula `f`, computed structurally and memoized
  /// on both ends so that inverse(inverse(f)) == f.
  FormulaId inverse(FormulaId f);

 private:
  FormulaId append(FormulaNode n);
  void check(FormulaId f) const;

  std::vector<FormulaNode> nodes_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, FormulaId> var_table_;
  std::unordered_map<std::uint64_t, FormulaId> not_table_;
  std::unordered_map<std::uint64_t, FormulaId> and_table_;
  std::unordered_map<std::uint64_t, FormulaId> or_table_;
  std::optional<FormulaId> top_;
  std::optional<FormulaId> bot_;
};

/// Distinct nodes reachable from the roots, children before parents.
std::vector<FormulaId> topo_order(const FormulaStore& store, std::span<const FormulaId> roots);
std::vector<FormulaId> topo_order(const FormulaStore& store, FormulaId root);

using Assignment = std::map<std::string, bool, std::less<>>;

/// Classical evaluation. Throws EvaluationError naming the first unassigned variable.
bool evaluate(const FormulaStore& store, FormulaId f, const Assignment& assignment);

/// Number of distinct And/Or nodes reachable from `f`.
std::size_t connective_count(const FormulaStore& store, FormulaId f);

/// Number of distinct nodes reachable from `f`.
std::size_t dag_size(const FormulaStore& store, FormulaId f);

/// Variable names occurring in `f`, sorted.
std::vector<std::string> variables(const FormulaStore& store, FormulaId f);
std::vector<std::string> variables(const FormulaStore& store, std::span<const FormulaId> roots);

bool contains_constant(const FormulaStore& store, FormulaId f);

/// Bit-parallel evaluator over a fixed variable order; evaluates 64
/// assignments per call. Variables missing from `order` raise EvaluationError.
class BatchEvaluator {
 public:
  BatchEvaluator(const FormulaStore& store, FormulaId root, std::vector<std::string> order);

  /// `inputs[i]` holds 64 values for variable `order[i]`.
  std::uint64_t run(std::span<const std::uint64_t> inputs) const;

  std::size_t num_vars() const { return order_.size(); }

 private:
  struct Step {
    Kind kind;
    std::uint32_t a;
    std::uint32_t b;
  };
  std::vector<std::string> order_;
  std::vector<Step> steps_;
};

}  // namespace ol
