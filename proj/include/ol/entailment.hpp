#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ol/formula.hpp"
#include "ol/formula_io.hpp"

namespace ol {

/// Unordered pair of right-annotated NNF formulas, stored as (min id, max id).
struct Sequent {
  FormulaId first;
  FormulaId second;

  static Sequent of(FormulaId a, FormulaId b) { return a <= b ? Sequent{a, b} : Sequent{b, a}; }
  bool contains(FormulaId f) const { return first == f || second == f; }
  /// The component other than `f`; `f` itself when both components are `f`.
  FormulaId other(FormulaId f) const { return first == f ? second : first; }
  friend constexpr auto operator<=>(const Sequent&, const Sequent&) = default;
};

enum class Rule : std::uint8_t { Ax, Hyp, Cut, AndR, OrR, Replace };
std::string_view rule_name(Rule r);

struct DerivationRecord {
  Sequent conclusion;
  Rule rule = Rule::Ax;
  std::vector<Sequent> premises;
  /// Cut formula for Rule::Cut: premises are (x, cut) and (inverse(cut), y).
  std::optional<FormulaId> cut_formula;
};

/// Axioms in right-only NNF form together with the inverse-closed set of
/// formulas they mention (the only admissible cut formulas).
struct AxiomSet {
  std::vector<Sequent> axioms;
  std::vector<FormulaId> axiom_formulas;  // sorted, unique

  bool is_axiom_formula(FormulaId f) const;
  std::size_t size() const { return axioms.size(); }
};

enum class WorklistOrder { Lifo, Fifo };

struct Limits {
  std::size_t max_sequents = std::numeric_limits<std::size_t>::max();
  std::chrono::milliseconds max_time = std::chrono::milliseconds::max();
};

struct ProverOptions {
  Limits limits;
  WorklistOrder order = WorklistOrder::Lifo;
  bool record_derivations = true;
  /// Re-verify the index-map invariants after every iteration. Quadratic per
  /// iteration; for tests on small inputs only.
  bool check_invariants = false;
};

enum class Verdict { Proved, NotProvable, LimitExceeded };
std::string_view verdict_name(Verdict v);

struct ProofStats {
  std::size_t universe_size = 0;
  std::size_t axioms = 0;
  std::size_t proven = 0;
  std::uint64_t attempts = 0;
  std::uint64_t iterations = 0;
  double millis = 0.0;
};

class LimitExceeded : public std::runtime_error {
 public:
  explicit LimitExceeded(const ProofStats& stats);
  const ProofStats& stats() const { return stats_; }

 private:
  ProofStats stats_;
};

/// Saturation state: universe, proven set, worklist and the four index maps
/// (cut partners, pending conjunctions, conjunction partners, disjunction
/// parents). All sets are over dense local indices into the universe.
class EntailmentState {
 public:
  const std::vector<FormulaId>& universe() const { return universe_; }
  bool in_universe(FormulaId f) const { return local_.count(f.value) != 0; }

  bool is_proven(Sequent s) const;
  std::vector<Sequent> proven() const;
  std::size_t proven_count() const { return proven_count_; }
  std::size_t worklist_size() const { return worklist_.size(); }
  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t iterations() const { return iterations_; }

  std::vector<FormulaId> cut_partners(FormulaId a) const;
  std::vector<FormulaId> pending_conjunctions(FormulaId b, FormulaId k) const;
  std::vector<FormulaId> conjunction_partners(FormulaId a) const;
  std::vector<FormulaId> disjunction_parents(FormulaId a) const;

  bool recorded() const { return record_; }
  std::size_t derivation_count() const { return records_.size(); }
  DerivationRecord derivation_at(std::size_t i) const;
  std::optional<DerivationRecord> derivation(Sequent s) const;
  /// Testing hook: replaces the stored record for `r.conclusion`.
  void overwrite_derivation(const DerivationRecord& r);

  /// Verifies the index-map invariants against the processed part of the
  /// proven set (proven minus worklist). Returns a description of the first
  /// violation, if any.
  std::optional<std::string> check_invariants() const;

 private:
  friend struct Prover;

  using Key = std::uint64_t;
  static Key key(std::uint32_t a, std::uint32_t b) {
    return a <= b ? (Key{a} << 32) | b : (Key{b} << 32) | a;
  }
  static std::uint32_t lo(Key k) { return static_cast<std::uint32_t>(k >> 32); }
  static std::uint32_t hi(Key k) { return static_cast<std::uint32_t>(k); }

  struct Record {
    Key conclusion;
    Key p1;
    Key p2;
    std::uint32_t cut;
    Rule rule;
  };
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  static constexpr Key kNoKey = std::numeric_limits<Key>::max();

  bool contains(Key k) const;
  void insert(Key k);
  Sequent to_sequent(Key k) const { return Sequent::of(universe_[lo(k)], universe_[hi(k)]); }
  std::uint32_t local(FormulaId f) const;
  std::optional<Key> local_key(Sequent s) const;

  // Universe.
  std::vector<FormulaId> universe_;
  std::unordered_map<std::uint32_t, std::uint32_t> local_;
  std::vector<std::uint32_t> inv_;
  std::vector<Kind> kind_;
  std::vector<std::uint32_t> left_;
  std::vector<std::uint32_t> right_;
  std::vector<bool> axiom_formula_;

  // Static indexes.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> sf_and_;  // (partner k, a∧k)
  std::vector<std::vector<std::uint32_t>> sf_or_;

  // Dynamic state.
  std::vector<std::vector<std::uint32_t>> p_cut_;
  std::unordered_map<Key, std::vector<std::uint32_t>> p_and_;
  std::vector<std::uint64_t> dense_;  // bit matrix when the universe is small
  std::unordered_set<Key> sparse_;
  bool use_dense_ = false;
  std::size_t proven_count_ = 0;
  std::deque<Key> worklist_;
  std::vector<Key> seeds_;

  bool record_ = true;
  std::vector<Record> records_;
  std::unordered_map<Key, std::uint32_t> record_index_;

  std::uint64_t attempts_ = 0;
  std::uint64_t iterations_ = 0;
};

struct PreparedGoal {
  Sequent goal;
  AxiomSet axioms;
  EntailmentState state;
};

/// Converts `lhs <= rhs` under `axioms` into right-only NNF sequents, builds
/// the inverse-closed universe and seeds the proven set with the axioms and
/// the Hyp sequents (x, ¬x) of every universe variable. Constants are first
/// rewritten as z∧¬z / z∨¬z over the reserved variable `kConstantVariable`.
PreparedGoal prepare_goal(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms,
                          const ProverOptions& options = {});

inline constexpr std::string_view kConstantVariable = "_z0";

/// Right-only form of `lhs <= rhs`: (inverse(nnf(lhs)), nnf(rhs)), after
/// constant elimination.
Sequent to_right_sequent(FormulaStore& store, FormulaId lhs, FormulaId rhs);

struct SaturationResult {
  Verdict verdict = Verdict::NotProvable;
  ProofStats stats;
};

/// Forward saturation. Stops as soon as the goal is proven (checked on push
/// and on pop), when the worklist is exhausted, or when a limit is hit.
SaturationResult saturate(EntailmentState& state, Sequent goal, const AxiomSet& axioms,
                          const ProverOptions& options = {});

struct ProofResult {
  bool proved = false;
  ProofStats stats;
};

/// prepare_goal followed by saturate. Throws LimitExceeded on budget exhaustion.
ProofResult prove(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms = {},
                  const ProverOptions& options = {});

struct DerivationCheck {
  bool ok = true;
  std::optional<Sequent> offending;
  std::string reason;
};

/// Replays every derivation record against its rule schema. Cut formulas must
/// be axiom formulas and premises must have been proven before the conclusion.
DerivationCheck check_derivations(const EntailmentState& state, const FormulaStore& store, const AxiomSet& axioms);

}  // namespace ol
