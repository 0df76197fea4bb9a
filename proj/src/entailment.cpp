#include "ol/entailment.hpp"

#include <algorithm>
#include <set>

namespace ol {

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Ax: return "Ax";
    case Rule::Hyp: return "Hyp";
    case Rule::Cut: return "Cut";
    case Rule::AndR: return "AndR";
    case Rule::OrR: return "OrR";
    case Rule::Replace: return "Replace";
  }
  return "?";
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "Proved";
    case Verdict::NotProvable: return "NotProvable";
    case Verdict::LimitExceeded: return "LimitExceeded";
  }
  return "?";
}

LimitExceeded::LimitExceeded(const ProofStats& stats)
    : std::runtime_error("proof search limit exceeded after " + std::to_string(stats.proven) + " sequents, " +
                         std::to_string(stats.attempts) + " attempts"),
      stats_(stats) {}

bool AxiomSet::is_axiom_formula(FormulaId f) const {
  return std::binary_search(axiom_formulas.begin(), axiom_formulas.end(), f);
}

namespace {

// Dense bit matrix up to this universe size (8 MiB), hash set beyond.
constexpr std::size_t kDenseLimit = 8192;

FormulaId eliminate_constants(FormulaStore& store, FormulaId f) {
  if (!contains_constant(store, f)) return f;
  const auto z = store.var(kConstantVariable);
  const auto nz = store.make_not(z);
  std::unordered_map<std::uint32_t, FormulaId> map;
  for (auto g : topo_order(store, f)) {
    const FormulaNode n = store.node(g);
    FormulaId r = g;
    switch (n.kind) {
      case Kind::Top: r = store.make_or(z, nz); break;
      case Kind::Bot: r = store.make_and(z, nz); break;
      case Kind::Not: r = store.make_not(map.at(n.left.value)); break;
      case Kind::And: r = store.make_and(map.at(n.left.value), map.at(n.right.value)); break;
      case Kind::Or: r = store.make_or(map.at(n.left.value), map.at(n.right.value)); break;
      case Kind::Var: break;
    }
    map[g.value] = r;
  }
  return map.at(f.value);
}

}  // namespace

Sequent to_right_sequent(FormulaStore& store, FormulaId lhs, FormulaId rhs) {
  const auto l = eliminate_constants(store, lhs);
  const auto r = eliminate_constants(store, rhs);
  return Sequent::of(store.inverse(store.nnf(l)), store.nnf(r));
}

// ---------------------------------------------------------------------------
// EntailmentState accessors

std::uint32_t EntailmentState::local(FormulaId f) const {
  auto it = local_.find(f.value);
  if (it == local_.end()) throw ContractViolation("formula " + std::to_string(f.value) + " is outside the universe");
  return it->second;
}

std::optional<EntailmentState::Key> EntailmentState::local_key(Sequent s) const {
  auto a = local_.find(s.first.value);
  auto b = local_.find(s.second.value);
  if (a == local_.end() || b == local_.end()) return std::nullopt;
  return key(a->second, b->second);
}

bool EntailmentState::contains(Key k) const {
  if (use_dense_) {
    const std::size_t bit = std::size_t{lo(k)} * universe_.size() + hi(k);
    return (dense_[bit >> 6] >> (bit & 63)) & 1;
  }
  return sparse_.count(k) != 0;
}

void EntailmentState::insert(Key k) {
  if (use_dense_) {
    const std::size_t bit = std::size_t{lo(k)} * universe_.size() + hi(k);
    dense_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
  } else {
    sparse_.insert(k);
  }
  ++proven_count_;
}

bool EntailmentState::is_proven(Sequent s) const {
  auto k = local_key(s);
  return k && contains(*k);
}

std::vector<Sequent> EntailmentState::proven() const {
  std::vector<Sequent> out;
  out.reserve(proven_count_);
  const auto n = static_cast<std::uint32_t>(universe_.size());
  if (use_dense_) {
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a; b < n; ++b)
        if (contains(key(a, b))) out.push_back(to_sequent(key(a, b)));
  } else {
    for (auto k : sparse_) out.push_back(to_sequent(k));
    std::sort(out.begin(), out.end());
  }
  return out;
}

std::vector<FormulaId> EntailmentState::cut_partners(FormulaId a) const {
  std::vector<FormulaId> out;
  for (auto b : p_cut_[local(a)]) out.push_back(universe_[b]);
  return out;
}

std::vector<FormulaId> EntailmentState::pending_conjunctions(FormulaId b, FormulaId k) const {
  std::vector<FormulaId> out;
  auto it = p_and_.find((Key{local(b)} << 32) | local(k));
  if (it != p_and_.end())
    for (auto c : it->second) out.push_back(universe_[c]);
  return out;
}

std::vector<FormulaId> EntailmentState::conjunction_partners(FormulaId a) const {
  std::vector<FormulaId> out;
  for (auto [k, conj] : sf_and_[local(a)]) out.push_back(universe_[k]);
  return out;
}

std::vector<FormulaId> EntailmentState::disjunction_parents(FormulaId a) const {
  std::vector<FormulaId> out;
  for (auto d : sf_or_[local(a)]) out.push_back(universe_[d]);
  return out;
}

DerivationRecord EntailmentState::derivation_at(std::size_t i) const {
  const auto& r = records_.at(i);
  DerivationRecord out{to_sequent(r.conclusion), r.rule, {}, std::nullopt};
  if (r.p1 != kNoKey) out.premises.push_back(to_sequent(r.p1));
  if (r.p2 != kNoKey) out.premises.push_back(to_sequent(r.p2));
  if (r.cut != kNone) out.cut_formula = universe_[r.cut];
  return out;
}

std::optional<DerivationRecord> EntailmentState::derivation(Sequent s) const {
  auto k = local_key(s);
  if (!k) return std::nullopt;
  auto it = record_index_.find(*k);
  if (it == record_index_.end()) return std::nullopt;
  return derivation_at(it->second);
}

void EntailmentState::overwrite_derivation(const DerivationRecord& r) {
  auto k = local_key(r.conclusion);
  if (!k) throw ContractViolation("conclusion outside the universe");
  auto it = record_index_.find(*k);
  if (it == record_index_.end()) throw ContractViolation("no record for this conclusion");
  auto to_key = [&](const Sequent& s) {
    auto pk = local_key(s);
    if (!pk) throw ContractViolation("premise outside the universe");
    return *pk;
  };
  auto& rec = records_[it->second];
  rec.rule = r.rule;
  rec.p1 = r.premises.size() > 0 ? to_key(r.premises[0]) : kNoKey;
  rec.p2 = r.premises.size() > 1 ? to_key(r.premises[1]) : kNoKey;
  rec.cut = r.cut_formula ? local(*r.cut_formula) : kNone;
}

std::optional<std::string> EntailmentState::check_invariants() const {
  const auto n = static_cast<std::uint32_t>(universe_.size());
  auto name = [&](Key k) {
    return "(" + std::to_string(universe_[lo(k)].value) + "," + std::to_string(universe_[hi(k)].value) + ")";
  };

  std::set<Key> pending;
  for (auto k : worklist_) {
    if (!contains(k)) return "worklist member " + name(k) + " is not proven";
    if (!pending.insert(k).second) return "worklist holds " + name(k) + " twice";
  }
  std::vector<Key> processed;
  for (const auto& s : proven()) {
    auto k = *local_key(s);
    if (!pending.count(k)) processed.push_back(k);
  }

  // Conjunction partners and disjunction parents, re-derived from the universe.
  std::vector<std::set<std::pair<std::uint32_t, std::uint32_t>>> and_expect(n);
  std::vector<std::set<std::uint32_t>> or_expect(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    if (kind_[c] == Kind::And) {
      and_expect[left_[c]].insert({right_[c], c});
      and_expect[right_[c]].insert({left_[c], c});
    } else if (kind_[c] == Kind::Or) {
      or_expect[left_[c]].insert(c);
      or_expect[right_[c]].insert(c);
    }
  }
  for (std::uint32_t a = 0; a < n; ++a) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> got(sf_and_[a].begin(), sf_and_[a].end());
    if (got != and_expect[a]) return "conjunction partners of " + std::to_string(universe_[a].value) + " are wrong";
    std::set<std::uint32_t> got_or(sf_or_[a].begin(), sf_or_[a].end());
    if (got_or != or_expect[a]) return "disjunction parents of " + std::to_string(universe_[a].value) + " are wrong";
  }

  // Cut partners: p_cut(a) = { b | (inverse(a), b) processed } on axiom formulas, empty elsewhere.
  std::vector<std::set<std::uint32_t>> cut_expect(n);
  for (auto k : processed) {
    const auto x = lo(k), y = hi(k);
    if (axiom_formula_[x]) cut_expect[inv_[x]].insert(y);
    if (axiom_formula_[y]) cut_expect[inv_[y]].insert(x);
  }
  for (std::uint32_t a = 0; a < n; ++a) {
    if (!p_cut_[a].empty() && !axiom_formula_[a])
      return "cut partners recorded for non-axiom formula " + std::to_string(universe_[a].value);
    std::set<std::uint32_t> got(p_cut_[a].begin(), p_cut_[a].end());
    if (got.size() != p_cut_[a].size()) return "duplicate cut partner for " + std::to_string(universe_[a].value);
    if (got != cut_expect[a]) return "cut partners of " + std::to_string(universe_[a].value) + " are wrong";
  }

  // Pending conjunctions: p_and(b, k) = { a∧k ∈ U | (a, b) processed }.
  std::map<Key, std::set<std::uint32_t>> and_pending;
  for (auto k : processed) {
    const std::uint32_t ends[2][2] = {{lo(k), hi(k)}, {hi(k), lo(k)}};
    for (auto [a, b] : ends) {
      for (std::uint32_t c = 0; c < n; ++c) {
        if (kind_[c] != Kind::And) continue;
        if (left_[c] == a) and_pending[(Key{b} << 32) | right_[c]].insert(c);
        if (right_[c] == a) and_pending[(Key{b} << 32) | left_[c]].insert(c);
      }
    }
  }
  std::vector<std::size_t> per_b(n, 0);
  for (const auto& [bk, list] : p_and_) {
    std::set<std::uint32_t> got(list.begin(), list.end());
    if (got.size() != list.size()) return "duplicate pending conjunction";
    auto it = and_pending.find(bk);
    if ((it == and_pending.end() && !got.empty()) || (it != and_pending.end() && it->second != got))
      return "pending conjunctions for key " + std::to_string(bk) + " are wrong";
    per_b[bk >> 32] += list.size();
  }
  for (const auto& [bk, expect] : and_pending) {
    auto it = p_and_.find(bk);
    if (it == p_and_.end() || it->second.size() != expect.size()) return "missing pending conjunctions";
  }
  for (std::uint32_t b = 0; b < n; ++b)
    if (per_b[b] > 2 * std::size_t{n}) return "pending conjunctions exceed 2|U| for " + std::to_string(universe_[b].value);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Preparation and saturation

struct Prover {
  using Key = EntailmentState::Key;

  static std::optional<Key> key_of(const EntailmentState& st, Sequent s) { return st.local_key(s); }

  static void seed(EntailmentState& st, Key k, Rule rule) {
    if (st.contains(k)) return;
    st.insert(k);
    st.worklist_.push_back(k);
    st.seeds_.push_back(k);
    record(st, k, rule, EntailmentState::kNoKey, EntailmentState::kNoKey, EntailmentState::kNone);
  }

  static void record(EntailmentState& st, Key k, Rule rule, Key p1, Key p2, std::uint32_t cut) {
    if (!st.record_) return;
    st.record_index_.emplace(k, static_cast<std::uint32_t>(st.records_.size()));
    st.records_.push_back({k, p1, p2, cut, rule});
  }

  static PreparedGoal prepare(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms,
                              const ProverOptions& options) {
    PreparedGoal out{to_right_sequent(store, lhs, rhs), {}, {}};
    std::vector<FormulaId> roots{out.goal.first, out.goal.second};
    for (const auto& ax : axioms) {
      auto s = to_right_sequent(store, ax.lhs, ax.rhs);
      out.axioms.axioms.push_back(s);
      for (auto f : {s.first, s.second}) {
        out.axioms.axiom_formulas.push_back(f);
        out.axioms.axiom_formulas.push_back(store.inverse(f));
        roots.push_back(f);
      }
    }
    auto& af = out.axioms.axiom_formulas;
    std::sort(af.begin(), af.end());
    af.erase(std::unique(af.begin(), af.end()), af.end());

    const std::size_t base = roots.size();
    for (std::size_t i = 0; i < base; ++i) roots.push_back(store.inverse(roots[i]));

    auto& st = out.state;
    st.universe_ = topo_order(store, roots);
    const auto n = static_cast<std::uint32_t>(st.universe_.size());
    st.local_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) st.local_.emplace(st.universe_[i].value, i);
    st.inv_.resize(n);
    st.kind_.resize(n);
    st.left_.assign(n, EntailmentState::kNone);
    st.right_.assign(n, EntailmentState::kNone);
    st.axiom_formula_.assign(n, false);
    st.sf_and_.resize(n);
    st.sf_or_.resize(n);
    st.p_cut_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto f = st.universe_[i];
      const auto& node = store.node(f);
      st.kind_[i] = node.kind;
      st.inv_[i] = st.local(store.inverse(f));
      st.axiom_formula_[i] = out.axioms.is_axiom_formula(f);
      if (node.kind == Kind::And || node.kind == Kind::Or) {
        st.left_[i] = st.local(node.left);
        st.right_[i] = st.local(node.right);
      }
    }
    for (std::uint32_t c = 0; c < n; ++c) {
      const auto l = st.left_[c], r = st.right_[c];
      if (st.kind_[c] == Kind::And) {
        st.sf_and_[l].emplace_back(r, c);
        if (l != r) st.sf_and_[r].emplace_back(l, c);
      } else if (st.kind_[c] == Kind::Or) {
        st.sf_or_[l].push_back(c);
        if (l != r) st.sf_or_[r].push_back(c);
      }
    }

    st.use_dense_ = n <= kDenseLimit;
    if (st.use_dense_) st.dense_.assign((std::size_t{n} * n + 63) / 64, 0);
    st.record_ = options.record_derivations;

    for (const auto& ax : out.axioms.axioms) seed(st, *st.local_key(ax), Rule::Ax);
    for (std::uint32_t i = 0; i < n; ++i)
      if (st.kind_[i] == Kind::Var) seed(st, EntailmentState::key(i, st.inv_[i]), Rule::Hyp);
    return out;
  }

  EntailmentState& st;
  Key goal;
  const ProverOptions& options;
  bool found = false;

  void push(std::uint32_t a, std::uint32_t b, Rule rule, Key p1, Key p2, std::uint32_t cut) {
    ++st.attempts_;
    const Key k = EntailmentState::key(a, b);
    if (st.contains(k)) return;
    st.insert(k);
    st.worklist_.push_back(k);
    record(st, k, rule, p1, p2, cut);
    if (k == goal) found = true;
  }

  // Consequences of the popped sequent (a, b) in which `b` is carried over.
  void deduce(std::uint32_t a, std::uint32_t b, Key popped) {
    for (auto d : st.sf_or_[a]) push(d, b, Rule::OrR, popped, EntailmentState::kNoKey, EntailmentState::kNone);
    if (auto it = st.p_and_.find((Key{b} << 32) | a); it != st.p_and_.end()) {
      for (auto conj : it->second) {
        const auto x = st.left_[conj] == a ? st.right_[conj] : st.left_[conj];
        push(conj, b, Rule::AndR, EntailmentState::key(x, b), popped, EntailmentState::kNone);
      }
    }
    for (auto phi : st.p_cut_[a])
      push(phi, b, Rule::Cut, popped, EntailmentState::key(st.inv_[a], phi), a);
  }

  Verdict run() {
    if (st.contains(goal)) return Verdict::Proved;
    const auto start = std::chrono::steady_clock::now();
    const auto n = static_cast<std::uint32_t>(st.universe_.size());
    while (!st.worklist_.empty()) {
      if (st.proven_count_ > options.limits.max_sequents) return Verdict::LimitExceeded;
      if ((st.iterations_ & 255) == 0 && options.limits.max_time != std::chrono::milliseconds::max() &&
          std::chrono::steady_clock::now() - start > options.limits.max_time)
        return Verdict::LimitExceeded;
      Key k;
      if (options.order == WorklistOrder::Lifo) {
        k = st.worklist_.back();
        st.worklist_.pop_back();
      } else {
        k = st.worklist_.front();
        st.worklist_.pop_front();
      }
      ++st.iterations_;
      if (k == goal) return Verdict::Proved;
      const auto a = EntailmentState::lo(k), b = EntailmentState::hi(k);

      if (st.axiom_formula_[a]) st.p_cut_[st.inv_[a]].push_back(b);
      if (st.axiom_formula_[b] && a != b) st.p_cut_[st.inv_[b]].push_back(a);

      for (auto [partner, conj] : st.sf_and_[a]) st.p_and_[(Key{b} << 32) | partner].push_back(conj);
      if (a != b)
        for (auto [partner, conj] : st.sf_and_[b]) st.p_and_[(Key{a} << 32) | partner].push_back(conj);

      deduce(a, b, k);
      if (a != b) deduce(b, a, k);
      if (a == b)
        for (std::uint32_t phi = 0; phi < n; ++phi)
          push(phi, a, Rule::Replace, k, EntailmentState::kNoKey, EntailmentState::kNone);

      if (options.check_invariants) {
        if (auto err = st.check_invariants()) throw ContractViolation("invariant violated: " + *err);
      }
      if (found) return Verdict::Proved;
    }
    return Verdict::NotProvable;
  }
};

PreparedGoal prepare_goal(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms,
                          const ProverOptions& options) {
  return Prover::prepare(store, lhs, rhs, axioms, options);
}

SaturationResult saturate(EntailmentState& state, Sequent goal, const AxiomSet& axioms, const ProverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto gk = Prover::key_of(state, goal);
  if (!gk) throw ContractViolation("goal sequent is outside the universe");
  Prover prover{state, *gk, options};
  SaturationResult out;
  out.verdict = prover.run();
  out.stats.universe_size = state.universe().size();
  out.stats.axioms = axioms.size();
  out.stats.proven = state.proven_count();
  out.stats.attempts = state.attempts();
  out.stats.iterations = state.iterations();
  out.stats.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ProofResult prove(FormulaStore& store, FormulaId lhs, FormulaId rhs, std::span<const Inequality> axioms,
                  const ProverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto prepared = prepare_goal(store, lhs, rhs, axioms, options);
  auto result = saturate(prepared.state, prepared.goal, prepared.axioms, options);
  result.stats.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (result.verdict == Verdict::LimitExceeded) throw LimitExceeded(result.stats);
  return {result.verdict == Verdict::Proved, result.stats};
}

// ---------------------------------------------------------------------------
// Derivation replay

DerivationCheck check_derivations(const EntailmentState& state, const FormulaStore& store, const AxiomSet& axioms) {
  if (!state.recorded()) return {false, std::nullopt, "derivations were not recorded"};
  std::unordered_map<std::uint64_t, std::size_t> order;
  auto pack = [](const Sequent& s) { return (std::uint64_t{s.first.value} << 32) | s.second.value; };
  const std::size_t count = state.derivation_count();
  std::vector<DerivationRecord> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    records.push_back(state.derivation_at(i));
    order.emplace(pack(records.back().conclusion), i);
  }
  if (records.size() != state.proven_count()) return {false, std::nullopt, "proven sequents without a derivation record"};

  auto is_and = [&](FormulaId f) { return store.kind(f) == Kind::And; };
  auto is_or = [&](FormulaId f) { return store.kind(f) == Kind::Or; };

  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = records[i];
    const auto& c = r.conclusion;
    auto fail = [&](const std::string& why) {
      return DerivationCheck{false, c, std::string(rule_name(r.rule)) + ": " + why};
    };
    for (const auto& p : r.premises) {
      auto it = order.find(pack(p));
      if (it == order.end()) return fail("premise was never proven");
      if (it->second >= i) return fail("premise proven after its conclusion");
    }
    auto premise_count = [&](std::size_t n) { return r.premises.size() == n; };
    bool ok = false;
    switch (r.rule) {
      case Rule::Ax:
        ok = premise_count(0) && std::find(axioms.axioms.begin(), axioms.axioms.end(), c) != axioms.axioms.end();
        break;
      case Rule::Hyp: {
        auto is_hyp = [&](FormulaId x, FormulaId y) {
          return store.kind(x) == Kind::Var && store.kind(y) == Kind::Not && store.operand(y) == x;
        };
        ok = premise_count(0) && (is_hyp(c.first, c.second) || is_hyp(c.second, c.first));
        break;
      }
      case Rule::Cut: {
        if (!premise_count(2) || !r.cut_formula) return fail("needs two premises and a cut formula");
        const auto g = *r.cut_formula;
        if (!axioms.is_axiom_formula(g)) return fail("cut formula is not an axiom formula");
        if (!store.is_nnf(g)) return fail("cut formula is not in NNF");
        const auto& p1 = r.premises[0];
        const auto& p2 = r.premises[1];
        const auto ng = store.node(g).cached_inverse;
        if (!ng) return fail("cut formula has no inverse");
        ok = p1.contains(g) && p2.contains(*ng) && Sequent::of(p1.other(g), p2.other(*ng)) == c;
        break;
      }
      case Rule::AndR: {
        if (!premise_count(2)) return fail("needs two premises");
        auto matches = [&](FormulaId conj, FormulaId side) {
          if (!is_and(conj)) return false;
          const auto e1 = Sequent::of(store.left(conj), side);
          const auto e2 = Sequent::of(store.right(conj), side);
          return (r.premises[0] == e1 && r.premises[1] == e2) || (r.premises[0] == e2 && r.premises[1] == e1);
        };
        ok = matches(c.first, c.second) || matches(c.second, c.first);
        break;
      }
      case Rule::OrR: {
        if (!premise_count(1)) return fail("needs one premise");
        auto matches = [&](FormulaId disj, FormulaId side) {
          return is_or(disj) && (r.premises[0] == Sequent::of(store.left(disj), side) ||
                                 r.premises[0] == Sequent::of(store.right(disj), side));
        };
        ok = matches(c.first, c.second) || matches(c.second, c.first);
        break;
      }
      case Rule::Replace: {
        if (!premise_count(1)) return fail("needs one premise");
        const auto& p = r.premises[0];
        ok = p.first == p.second && c.contains(p.first);
        break;
      }
    }
    if (!ok) return fail("does not instantiate the rule schema");
  }
  return {};
}

}  // namespace ol
