#include "ol/oracle.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace ol {

namespace {

std::uint64_t pack(Sequent s) { return (std::uint64_t{s.first.value} << 32) | s.second.value; }

FormulaId cached_inverse(const FormulaStore& store, FormulaId f) {
  const auto& inv = store.node(f).cached_inverse;
  if (!inv) throw ContractViolation("naive_prove: formula outside the prepared universe");
  return *inv;
}

class BackwardSearch {
 public:
  BackwardSearch(const FormulaStore& store, const AxiomSet& axioms, std::size_t depth_limit, bool cache)
      : store_(store), axioms_(axioms), depth_limit_(depth_limit), cache_(cache) {
    for (const auto& a : axioms.axioms) axiom_set_.insert(pack(a));
    for (auto g : axioms.axiom_formulas) cuts_.emplace_back(g, cached_inverse(store, g));
  }

  // `low` is the smallest branch depth of a sequent that was blocked by the
  // path check somewhere below; kFree when none was.
  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  struct Outcome {
    bool ok;
    std::size_t low;
  };

  Outcome solve(Sequent s, std::size_t depth) {
    ++stats.calls;
    stats.max_depth = std::max(stats.max_depth, depth);
    const auto k = pack(s);
    if (proved_.count(k)) return {true, kFree};
    if (failed_.count(k)) return {false, kFree};
    if (auto it = path_.find(k); it != path_.end()) return {false, it->second};
    if (depth > depth_limit_) throw DepthLimitExceeded("backward search exceeded depth " + std::to_string(depth_limit_));

    path_.emplace(k, depth);
    std::size_t low = kFree;
    auto sub = [&](FormulaId a, FormulaId b) {
      auto r = solve(Sequent::of(a, b), depth + 1);
      low = std::min(low, r.low);
      return r.ok;
    };
    const auto p = s.first, q = s.second;
    bool ok = is_hyp(p, q) || is_hyp(q, p) || axiom_set_.count(k);
    const std::pair<FormulaId, FormulaId> sides[] = {{p, q}, {q, p}};
    for (auto [x, y] : sides) {
      if (ok) break;
      const auto kind = store_.kind(x);
      if (kind == Kind::Or) ok = sub(store_.left(x), y) || sub(store_.right(x), y);
      else if (kind == Kind::And) ok = sub(store_.left(x), y) && sub(store_.right(x), y);
      if (p == q) break;
    }
    if (!ok && p != q) ok = sub(p, p) || sub(q, q);
    for (std::size_t i = 0; !ok && i < cuts_.size(); ++i) {
      const auto [g, ng] = cuts_[i];
      ok = sub(p, g) && sub(ng, q);
    }
    path_.erase(k);

    if (ok) {
      if (cache_) proved_.insert(k);
      return {true, kFree};
    }
    // A failure that only leaned on this sequent or on sequents below it on
    // the branch does not depend on how the branch reached here.
    if (low >= depth) {
      if (cache_) failed_.insert(k);
      return {false, kFree};
    }
    return {false, low};
  }

  NaiveStats stats;

 private:
  bool is_hyp(FormulaId x, FormulaId y) const {
    return store_.kind(x) == Kind::Var && store_.kind(y) == Kind::Not && store_.operand(y) == x;
  }

  const FormulaStore& store_;
  const AxiomSet& axioms_;
  std::size_t depth_limit_;
  bool cache_;
  std::unordered_set<std::uint64_t> axiom_set_;
  std::vector<std::pair<FormulaId, FormulaId>> cuts_;
  std::unordered_map<std::uint64_t, std::size_t> path_;
  std::unordered_set<std::uint64_t> proved_;
  std::unordered_set<std::uint64_t> failed_;
};

// Backward closure: every sequent reachable from the goal by reading a rule
// bottom-up, with its rule instances as premise lists. Provability is then
// the least set closed under those instances.
class BackwardFixpoint {
 public:
  BackwardFixpoint(const FormulaStore& store, const AxiomSet& axioms) : store_(store) {
    for (const auto& a : axioms.axioms) axiom_set_.insert(pack(a));
    for (auto g : axioms.axiom_formulas) cuts_.emplace_back(g, cached_inverse(store, g));
  }

  bool run(Sequent goal, NaiveStats& stats) {
    intern(goal);
    for (std::size_t i = 0; i < nodes_.size(); ++i) expand(i);
    stats.calls = nodes_.size();
    std::vector<char> proven(nodes_.size(), 0);
    for (bool changed = true; changed;) {
      changed = false;
      ++stats.max_depth;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (proven[i]) continue;
        for (const auto& inst : nodes_[i].instances) {
          const bool all = std::all_of(inst.begin(), inst.end(), [&](std::size_t p) { return proven[p] != 0; });
          if (all) {
            proven[i] = 1;
            changed = true;
            break;
          }
        }
      }
      if (proven[0]) return true;
    }
    return false;
  }

 private:
  struct Node {
    Sequent s;
    std::vector<std::vector<std::size_t>> instances;
  };

  std::size_t intern(Sequent s) {
    auto [it, fresh] = index_.try_emplace(pack(s), nodes_.size());
    if (fresh) nodes_.push_back({s, {}});
    return it->second;
  }

  void expand(std::size_t i) {
    const auto s = nodes_[i].s;
    const auto p = s.first, q = s.second;
    std::vector<std::vector<std::size_t>> inst;
    const bool leaf = (store_.kind(p) == Kind::Var && store_.kind(q) == Kind::Not && store_.operand(q) == p) ||
                      (store_.kind(q) == Kind::Var && store_.kind(p) == Kind::Not && store_.operand(p) == q) ||
                      axiom_set_.count(pack(s));
    if (leaf) inst.push_back({});
    auto premise = [&](FormulaId a, FormulaId b) { return intern(Sequent::of(a, b)); };
    const std::pair<FormulaId, FormulaId> sides[] = {{p, q}, {q, p}};
    for (auto [x, y] : sides) {
      const auto kind = store_.kind(x);
      if (kind == Kind::Or) {
        inst.push_back({premise(store_.left(x), y)});
        inst.push_back({premise(store_.right(x), y)});
      } else if (kind == Kind::And) {
        inst.push_back({premise(store_.left(x), y), premise(store_.right(x), y)});
      }
    }
    inst.push_back({premise(p, p)});
    inst.push_back({premise(q, q)});
    for (auto [g, ng] : cuts_) inst.push_back({premise(p, g), premise(ng, q)});
    nodes_[i].instances = std::move(inst);
  }

  const FormulaStore& store_;
  std::unordered_set<std::uint64_t> axiom_set_;
  std::vector<std::pair<FormulaId, FormulaId>> cuts_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<Node> nodes_;
};

// Evaluates each root over the shared variable order, 64 assignments at a
// time, and hands the result words plus the valid-lane mask to `visit`.
template <class Visit>
void for_all_assignments(const FormulaStore& store, std::span<const FormulaId> roots, Visit visit) {
  auto vars = variables(store, roots);
  if (vars.size() > kMaxTautologyVars)
    throw GuardExceeded("brute force limited to " + std::to_string(kMaxTautologyVars) + " variables, got " +
                        std::to_string(vars.size()));
  std::vector<BatchEvaluator> evals;
  for (auto r : roots) evals.emplace_back(store, r, vars);
  static constexpr std::uint64_t kLane[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                             0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const std::size_t n = vars.size();
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t mask = total >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << total) - 1;
  std::vector<std::uint64_t> in(n);
  std::vector<std::uint64_t> out(roots.size());
  for (std::uint64_t base = 0; base < total; base += 64) {
    for (std::size_t i = 0; i < n; ++i) in[i] = i < 6 ? kLane[i] : (((base >> i) & 1) ? ~std::uint64_t{0} : 0);
    for (std::size_t r = 0; r < evals.size(); ++r) out[r] = evals[r].run(in);
    if (!visit(std::span<const std::uint64_t>(out), mask)) return;
  }
}

}  // namespace

bool naive_prove(const FormulaStore& store, Sequent goal, const AxiomSet& axioms, const NaiveOptions& options,
                 NaiveStats* stats) {
  if (options.strategy == NaiveStrategy::Fixpoint) {
    BackwardFixpoint fix(store, axioms);
    NaiveStats local;
    const bool ok = fix.run(goal, local);
    if (stats) *stats = local;
    return ok;
  }
  std::size_t limit = options.depth_limit;
  if (limit == 0) {
    std::vector<FormulaId> roots{goal.first, goal.second};
    for (const auto& a : axioms.axioms) {
      roots.push_back(a.first);
      roots.push_back(a.second);
    }
    const std::size_t base = roots.size();
    for (std::size_t i = 0; i < base; ++i) roots.push_back(cached_inverse(store, roots[i]));
    const auto u = topo_order(store, roots).size();
    limit = 2 * (u * u + 1);
  }
  BackwardSearch search(store, axioms, limit, options.cache);
  const bool ok = search.solve(goal, 0).ok;
  if (stats) *stats = search.stats;
  return ok;
}

bool naive_prove(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms,
                 const NaiveOptions& options, NaiveStats* stats) {
  auto prepared = prepare_goal(store, lhs, rhs, axioms, {.record_derivations = false});
  return naive_prove(store, prepared.goal, prepared.axioms, options, stats);
}

bool brute_force_tautology(const FormulaStore& store, FormulaId f) {
  bool all = true;
  const FormulaId roots[] = {f};
  for_all_assignments(store, roots, [&](std::span<const std::uint64_t> out, std::uint64_t mask) {
    all = (out[0] & mask) == mask;
    return all;
  });
  return all;
}

bool brute_force_satisfiable(const FormulaStore& store, FormulaId f) {
  bool sat = false;
  const FormulaId roots[] = {f};
  for_all_assignments(store, roots, [&](std::span<const std::uint64_t> out, std::uint64_t mask) {
    sat = (out[0] & mask) != 0;
    return !sat;
  });
  return sat;
}

bool brute_force_equivalent(const FormulaStore& store, FormulaId f, FormulaId g) {
  bool same = true;
  const FormulaId roots[] = {f, g};
  for_all_assignments(store, roots, [&](std::span<const std::uint64_t> out, std::uint64_t mask) {
    same = ((out[0] ^ out[1]) & mask) == 0;
    return same;
  });
  return same;
}

std::string pool_var(unsigned i) { return "v" + std::to_string(i); }

namespace {

void check_pool_guard(unsigned vars, unsigned max_connectives) {
  if (vars == 0 || vars > kMaxPoolVars || max_connectives > kMaxPoolConnectives)
    throw GuardExceeded("formula pool limited to 1.." + std::to_string(kMaxPoolVars) + " variables and " +
                        std::to_string(kMaxPoolConnectives) + " connectives");
}

class Enumerator {
 public:
  Enumerator(FormulaStore& store, unsigned vars, const std::function<bool(FormulaId)>& visit) : store_(store), visit_(visit) {
    for (unsigned i = 0; i < vars; ++i) {
      auto v = store.var(pool_var(i));
      literals_.push_back(v);
      literals_.push_back(store.make_not(v));
    }
  }

  bool level(unsigned k) {
    return gen(k, [&](FormulaId f) {
      ++count;
      return visit_(f);
    });
  }

  std::size_t count = 0;

 private:
  using Emit = std::function<bool(FormulaId)>;

  // Calls `emit` on every formula with exactly k tree connectives.
  bool gen(unsigned k, const Emit& emit) {
    if (k == 0) {
      for (auto l : literals_)
        if (!emit(l)) return false;
      return true;
    }
    for (Kind op : {Kind::And, Kind::Or}) {
      for (unsigned i = 0; i < k; ++i) {
        const bool go = gen(i, [&](FormulaId l) {
          return gen(k - 1 - i, [&](FormulaId r) {
            return emit(op == Kind::And ? store_.make_and(l, r) : store_.make_or(l, r));
          });
        });
        if (!go) return false;
      }
    }
    return true;
  }

  FormulaStore& store_;
  const std::function<bool(FormulaId)>& visit_;
  std::vector<FormulaId> literals_;
};

}  // namespace

std::size_t enumerate_formulas(FormulaStore& store, unsigned vars, unsigned max_connectives,
                               const std::function<bool(FormulaId)>& visit) {
  check_pool_guard(vars, max_connectives);
  Enumerator e(store, vars, visit);
  for (unsigned k = 0; k <= max_connectives; ++k)
    if (!e.level(k)) break;
  return e.count;
}

std::vector<FormulaId> formula_pool(FormulaStore& store, unsigned vars, unsigned max_connectives) {
  std::vector<FormulaId> out;
  enumerate_formulas(store, vars, max_connectives, [&](FormulaId f) {
    out.push_back(f);
    return true;
  });
  return out;
}

std::uint64_t pool_level_size(unsigned vars, unsigned connectives) {
  std::vector<std::uint64_t> level{2ULL * vars};
  for (unsigned k = 1; k <= connectives; ++k) {
    std::uint64_t sum = 0;
    for (unsigned i = 0; i < k; ++i) sum += level[i] * level[k - 1 - i];
    level.push_back(2 * sum);
  }
  return level[connectives];
}

namespace {

constexpr unsigned kMaxRandomConnectives = 33;

// Uniform integer in [0, n), independent of the standard library's distributions.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

class RandomBuilder {
 public:
  RandomBuilder(FormulaStore& store, std::uint64_t seed, unsigned vars) : store_(store), rng_(seed) {
    for (unsigned i = 0; i < vars; ++i) vars_.push_back(store.var(pool_var(i)));
    catalan_.push_back(1);
    for (unsigned n = 1; n <= kMaxRandomConnectives; ++n) {
      std::uint64_t c = 0;
      for (unsigned i = 0; i < n; ++i) c += catalan_[i] * catalan_[n - 1 - i];
      catalan_.push_back(c);
    }
  }

  FormulaId build(unsigned size) {
    if (size == 0) {
      auto v = vars_[below(rng_, vars_.size())];
      return below(rng_, 2) ? store_.make_not(v) : v;
    }
    // Left subtree size i with probability Cat(i) Cat(size-1-i) / Cat(size).
    std::uint64_t r = below(rng_, catalan_[size]);
    unsigned i = 0;
    for (;; ++i) {
      const auto w = catalan_[i] * catalan_[size - 1 - i];
      if (r < w) break;
      r -= w;
    }
    // Redraw on accidental sharing so that the DAG has exactly `size` connectives.
    for (;;) {
      const auto l = build(i);
      for (int tries = 0; tries < 64; ++tries) {
        const auto rr = build(size - 1 - i);
        const auto f = below(rng_, 2) ? store_.make_or(l, rr) : store_.make_and(l, rr);
        if (connective_count(store_, f) == size) return f;
      }
    }
  }

 private:
  FormulaStore& store_;
  std::mt19937_64 rng_;
  std::vector<FormulaId> vars_;
  std::vector<std::uint64_t> catalan_;
};

}  // namespace

FormulaId random_formula(FormulaStore& store, std::uint64_t seed, unsigned vars, unsigned connectives) {
  if (vars == 0) throw GuardExceeded("random_formula needs at least one variable");
  if (connectives > kMaxRandomConnectives)
    throw GuardExceeded("random_formula limited to " + std::to_string(kMaxRandomConnectives) + " connectives");
  RandomBuilder b(store, seed, vars);
  return b.build(connectives);
}

}  // namespace ol
