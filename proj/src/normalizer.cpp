#include "ol/normalizer.hpp"

#include <algorithm>

namespace ol {

namespace {

std::uint64_t pack(FormulaId a, FormulaId b) {
  if (b < a) std::swap(a, b);
  return (std::uint64_t{a.value} << 32) | b.value;
}

}  // namespace

bool Normalizer::leq(FormulaId a, FormulaId b) {
  ++stats_.leq_queries;
  return search(store_.inverse(a), b, 0).ok;
}

// Cut-free backward search on the right-only sequent (p, q), i.e. inverse(p) <= q.
// Constants are handled directly: (⊤, q) is an axiom and (⊥, q) holds iff (q, q) does.
Normalizer::Outcome Normalizer::search(FormulaId p, FormulaId q, std::size_t depth) {
  ++stats_.leq_visits;
  const auto k = pack(p, q);
  if (auto it = leq_cache_.find(k); it != leq_cache_.end()) return {it->second, kFree};
  if (auto it = path_.find(k); it != path_.end()) return {false, it->second};

  path_.emplace(k, depth);
  std::size_t low = kFree;
  auto sub = [&](FormulaId a, FormulaId b) {
    auto r = search(a, b, depth + 1);
    low = std::min(low, r.low);
    return r.ok;
  };
  auto hyp = [&](FormulaId x, FormulaId y) {
    return store_.kind(x) == Kind::Var && store_.kind(y) == Kind::Not && store_.operand(y) == x;
  };

  bool ok = store_.kind(p) == Kind::Top || store_.kind(q) == Kind::Top || hyp(p, q) || hyp(q, p);
  const std::pair<FormulaId, FormulaId> sides[] = {{p, q}, {q, p}};
  for (auto [x, y] : sides) {
    if (ok) break;
    switch (store_.kind(x)) {
      case Kind::Or: ok = sub(store_.left(x), y) || sub(store_.right(x), y); break;
      case Kind::And: ok = sub(store_.left(x), y) && sub(store_.right(x), y); break;
      case Kind::Bot: ok = sub(y, y); break;
      default: break;
    }
    if (p == q) break;
  }
  if (!ok && p != q) ok = sub(p, p) || sub(q, q);
  path_.erase(k);

  if (ok) {
    leq_cache_[k] = true;
    return {true, kFree};
  }
  if (low >= depth) {
    leq_cache_[k] = false;
    return {false, kFree};
  }
  ++stats_.cached_failures_skipped;
  return {false, low};
}

void Normalizer::flatten(FormulaId f, Kind kind, std::vector<FormulaId>& out) const {
  std::vector<FormulaId> stack{f};
  while (!stack.empty()) {
    auto g = stack.back();
    stack.pop_back();
    if (store_.kind(g) == kind) {
      stack.push_back(store_.right(g));
      stack.push_back(store_.left(g));
    } else {
      out.push_back(g);
    }
  }
}

FormulaId Normalizer::rebuild_and(const std::vector<FormulaId>& sorted) {
  FormulaId acc = sorted.back();
  for (std::size_t i = sorted.size() - 1; i-- > 0;) acc = store_.make_and(sorted[i], acc);
  return acc;
}

// Whether the meet of `set` minus the element at `skip` lies below `c`.
bool Normalizer::meet_leq(const std::vector<FormulaId>& set, std::size_t skip, FormulaId c) {
  for (std::size_t i = 0; i < set.size(); ++i)
    if (i != skip && leq(set[i], c)) return true;
  switch (store_.kind(c)) {
    case Kind::Or: return meet_leq(set, skip, store_.left(c)) || meet_leq(set, skip, store_.right(c));
    case Kind::And: return meet_leq(set, skip, store_.left(c)) && meet_leq(set, skip, store_.right(c));
    default: return false;
  }
}

// Children are already normal. Returns the normal form of their conjunction.
FormulaId Normalizer::reduce_and(std::vector<FormulaId> children) {
  constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);
  for (;;) {
    std::vector<FormulaId> set;
    for (auto c : children) flatten(c, Kind::And, set);
    bool bottom = false;
    std::erase_if(set, [&](FormulaId c) {
      bottom |= store_.kind(c) == Kind::Bot;
      return store_.kind(c) == Kind::Top;
    });
    if (bottom) return store_.bot();
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.empty()) return store_.top();
    if (set.size() == 1) return set[0];

    for (auto c : set)
      if (std::binary_search(set.begin(), set.end(), store_.inverse(c))) return store_.bot();
    if (leq(rebuild_and(set), store_.bot())) return store_.bot();

    // Drop children implied by the others, smallest id first, restarting after each drop.
    for (bool dropped = true; dropped && set.size() > 1;) {
      dropped = false;
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (meet_leq(set, i, set[i])) {
          set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
          dropped = true;
          break;
        }
      }
    }
    if (set.size() == 1) return set[0];

    // If the whole meet already lies below one disjunct of a disjunctive
    // child, that disjunct can stand in for the child.
    bool replaced = false;
    for (std::size_t i = 0; i < set.size() && !replaced; ++i) {
      if (store_.kind(set[i]) != Kind::Or) continue;
      std::vector<FormulaId> disjuncts;
      flatten(set[i], Kind::Or, disjuncts);
      std::sort(disjuncts.begin(), disjuncts.end());
      for (auto d : disjuncts) {
        if (meet_leq(set, kNoSkip, d)) {
          set[i] = d;
          replaced = true;
          break;
        }
      }
    }
    if (replaced) {
      children = std::move(set);
      continue;
    }
    return rebuild_and(set);
  }
}

FormulaId Normalizer::normalize_nnf(FormulaId root) {
  if (auto it = memo_.find(root.value); it != memo_.end()) return it->second;
  const FormulaId roots[] = {root};
  for (auto g : topo_order(store_, roots)) {
    if (memo_.count(g.value)) continue;
    const auto kind = store_.kind(g);
    FormulaId r = g;
    if (kind == Kind::And || kind == Kind::Or) {
      const FormulaId kids[] = {memo_.at(store_.left(g).value), memo_.at(store_.right(g).value)};
      if (kind == Kind::And) {
        r = reduce_and({kids[0], kids[1]});
      } else {
        std::vector<FormulaId> disjuncts;
        for (auto k : kids) flatten(k, Kind::Or, disjuncts);
        for (auto& d : disjuncts) d = store_.inverse(d);
        r = store_.inverse(reduce_and(std::move(disjuncts)));
      }
    }
    memo_[g.value] = r;
    memo_.emplace(r.value, r);
  }
  return memo_.at(root.value);
}

FormulaId Normalizer::normalize(FormulaId f) { return normalize_nnf(store_.nnf(f)); }

FormulaId normalize(FormulaStore& store, FormulaId f) { return Normalizer(store).normalize(f); }

bool leq(FormulaStore& store, FormulaId a, FormulaId b) { return Normalizer(store).leq(a, b); }

bool certify_equivalence(FormulaStore& store, FormulaId f, FormulaId g, const ProverOptions& options) {
  return prove(store, f, g, {}, options).proved && prove(store, g, f, {}, options).proved;
}

}  // namespace ol
