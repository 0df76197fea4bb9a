#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ol/entailment.hpp"
#include "ol/formula.hpp"

namespace ol {

/// Computes OL normal forms: equivalent, no larger in connectives, and equal
/// for two formulas exactly when they are OL-equivalent. One instance keeps
/// its caches across calls, so normalizing many cones of one circuit through
/// the same instance shares work and re-interned structure.
class Normalizer {
 public:
  explicit Normalizer(FormulaStore& store) : store_(store) {}

  FormulaId normalize(FormulaId f);

  /// a <= b in every ortholattice. Both arguments must be in NNF; ⊤/⊥ allowed.
  bool leq(FormulaId a, FormulaId b);

  struct Stats {
    std::uint64_t leq_queries = 0;
    std::uint64_t leq_visits = 0;
    std::uint64_t cached_failures_skipped = 0;  // failures not cached because of the path check
  };
  const Stats& stats() const { return stats_; }

 private:
  static constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  struct Outcome {
    bool ok;
    std::size_t low;
  };

  Outcome search(FormulaId p, FormulaId q, std::size_t depth);
  FormulaId normalize_nnf(FormulaId f);
  FormulaId reduce_and(std::vector<FormulaId> children);
  bool meet_leq(const std::vector<FormulaId>& set, std::size_t skip, FormulaId c);
  void flatten(FormulaId f, Kind kind, std::vector<FormulaId>& out) const;
  FormulaId rebuild_and(const std::vector<FormulaId>& sorted);

  FormulaStore& store_;
  std::unordered_map<std::uint32_t, FormulaId> memo_;
  std::unordered_map<std::uint64_t, bool> leq_cache_;
  std::unordered_map<std::uint64_t, std::size_t> path_;
  Stats stats_;
};

/// One-shot normalization with a fresh cache.
FormulaId normalize(FormulaStore& store, FormulaId f);

/// One-shot a <= b for NNF formulas.
bool leq(FormulaStore& store, FormulaId a, FormulaId b);

/// Runs the entailment engine (no axioms) on f <= g and g <= f.
/// Propagates LimitExceeded.
bool certify_equivalence(FormulaStore& store, FormulaId f, FormulaId g, const ProverOptions& options = {});

}  // namespace ol
