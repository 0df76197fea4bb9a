#include "ol/formula.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

namespace ol {

namespace {

std::uint64_t pack(FormulaId a, FormulaId b) {
  return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
}

// Iterative post-order over the DAG below `roots`. Nodes for which `skip`
// returns true are neither emitted nor descended into.
template <class Skip>
std::vector<FormulaId> post_order(const FormulaStore& store, std::span<const FormulaId> roots, Skip skip) {
  std::vector<FormulaId> out;
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::pair<FormulaId, bool>> stack;
  for (auto root : roots) stack.emplace_back(root, false);
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    auto [f, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      out.push_back(f);
      continue;
    }
    if (seen.count(f.value) || skip(f)) continue;
    seen.insert(f.value);
    stack.emplace_back(f, true);
    const auto& n = store.node(f);
    switch (n.kind) {
      case Kind::And:
      case Kind::Or:
        stack.emplace_back(n.right, false);
        stack.emplace_back(n.left, false);
        break;
      case Kind::Not:
        stack.emplace_back(n.left, false);
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Var: return "var";
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Top: return "true";
    case Kind::Bot: return "false";
  }
  return "?";
}

void FormulaStore::check(FormulaId f) const {
  if (!contains(f)) throw StructuralError("formula id " + std::to_string(f.value) + " is not in the store");
}

FormulaId FormulaStore::append(FormulaNode n) {
  switch (n.kind) {
    case Kind::Not: n.in_nnf = nodes_[n.left.value].kind == Kind::Var; break;
    case Kind::And:
    case Kind::Or: n.in_nnf = nodes_[n.left.value].in_nnf && nodes_[n.right.value].in_nnf; break;
    default: n.in_nnf = true; break;
  }
  FormulaId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(n);
  return id;
}

FormulaId FormulaStore::intern(Kind kind, std::span<const FormulaId> children) {
  auto arity = [&](std::size_t expected) {
    if (children.size() != expected)
      throw StructuralError(std::string(kind_name(kind)) + " expects " + std::to_string(expected) +
                            " children, got " + std::to_string(children.size()));
    for (auto c : children) check(c);
  };
  switch (kind) {
    case Kind::Var:
      throw StructuralError("variables are interned by name");
    case Kind::Top:
      arity(0);
      if (!top_) top_ = append({.kind = Kind::Top});
      return *top_;
    case Kind::Bot:
      arity(0);
      if (!bot_) bot_ = append({.kind = Kind::Bot});
      return *bot_;
    case Kind::Not: {
      arity(1);
      auto [it, fresh] = not_table_.try_emplace(children[0].value);
      if (fresh) it->second = append({.kind = Kind::Not, .left = children[0]});
      return it->second;
    }
    case Kind::And:
    case Kind::Or: {
      arity(2);
      auto& table = kind == Kind::And ? and_table_ : or_table_;
      auto [it, fresh] = table.try_emplace(pack(children[0], children[1]));
      if (fresh) it->second = append({.kind = kind, .left = children[0], .right = children[1]});
      return it->second;
    }
  }
  throw StructuralError("unknown kind");
}

FormulaId FormulaStore::var(std::string_view name) {
  auto it = var_table_.find(std::string(name));
  if (it != var_table_.end()) return it->second;
  FormulaId idx{static_cast<std::uint32_t>(names_.size())};
  names_.emplace_back(name);
  auto id = append({.kind = Kind::Var, .left = idx});
  var_table_.emplace(std::string(name), id);
  return id;
}

std::optional<FormulaId> FormulaStore::find_var(std::string_view name) const {
  auto it = var_table_.find(std::string(name));
  if (it == var_table_.end()) return std::nullopt;
  return it->second;
}

FormulaId FormulaStore::top() { return intern(Kind::Top); }
FormulaId FormulaStore::bot() { return intern(Kind::Bot); }

FormulaId FormulaStore::make_not(FormulaId f) {
  const FormulaId c[] = {f};
  return intern(Kind::Not, c);
}

FormulaId FormulaStore::make_and(FormulaId a, FormulaId b) {
  const FormulaId c[] = {a, b};
  return intern(Kind::And, c);
}

FormulaId FormulaStore::make_or(FormulaId a, FormulaId b) {
  const FormulaId c[] = {a, b};
  return intern(Kind::Or, c);
}

const std::string& FormulaStore::name(FormulaId f) const {
  const auto& n = node(f);
  if (n.kind != Kind::Var) throw ContractViolation("name() called on a non-variable node");
  return names_[n.left.value];
}

bool FormulaStore::is_literal(FormulaId f) const {
  const auto& n = node(f);
  return n.kind == Kind::Var || (n.kind == Kind::Not && node(n.left).kind == Kind::Var);
}

FormulaId FormulaStore::nnf(FormulaId f) {
  check(f);
  if (nodes_[f.value].cached_nnf) return *nodes_[f.value].cached_nnf;
  const FormulaId root[] = {f};
  auto order = post_order(*this, root, [&](FormulaId g) { return nodes_[g.value].cached_nnf.has_value(); });
  for (auto g : order) {
    const FormulaNode n = nodes_[g.value];  // copy: interning below may reallocate
    FormulaId r = g;
    switch (n.kind) {
      case Kind::Var:
      case Kind::Top:
      case Kind::Bot:
        break;
      case Kind::Not:
        r = inverse(*nodes_[n.left.value].cached_nnf);
        break;
      case Kind::And:
        r = make_and(*nodes_[n.left.value].cached_nnf, *nodes_[n.right.value].cached_nnf);
        break;
      case Kind::Or:
        r = make_or(*nodes_[n.left.value].cached_nnf, *nodes_[n.right.value].cached_nnf);
        break;
    }
    nodes_[g.value].cached_nnf = r;
    nodes_[r.value].cached_nnf = r;
  }
  return *nodes_[f.value].cached_nnf;
}

FormulaId FormulaStore::inverse(FormulaId f) {
  check(f);
  if (!nodes_[f.value].in_nnf) throw ContractViolation("inverse() requires a formula in negation normal form");
  if (nodes_[f.value].cached_inverse) return *nodes_[f.value].cached_inverse;
  const FormulaId root[] = {f};
  auto order = post_order(*this, root, [&](FormulaId g) { return nodes_[g.value].cached_inverse.has_value(); });
  for (auto g : order) {
    const FormulaNode n = nodes_[g.value];
    FormulaId r;
    switch (n.kind) {
      case Kind::Var: r = make_not(g); break;
      case Kind::Not: r = n.left; break;
      case Kind::Top: r = bot(); break;
      case Kind::Bot: r = top(); break;
      case Kind::And:
        r = make_or(*nodes_[n.left.value].cached_inverse, *nodes_[n.right.value].cached_inverse);
        break;
      case Kind::Or:
        r = make_and(*nodes_[n.left.value].cached_inverse, *nodes_[n.right.value].cached_inverse);
        break;
    }
    nodes_[g.value].cached_inverse = r;
    nodes_[r.value].cached_inverse = g;
    nodes_[g.value].cached_nnf = g;
    nodes_[r.value].cached_nnf = r;
  }
  return *nodes_[f.value].cached_inverse;
}

std::vector<FormulaId> topo_order(const FormulaStore& store, std::span<const FormulaId> roots) {
  return post_order(store, roots, [](FormulaId) { return false; });
}

std::vector<FormulaId> topo_order(const FormulaStore& store, FormulaId root) {
  const FormulaId roots[] = {root};
  return topo_order(store, roots);
}

bool evaluate(const FormulaStore& store, FormulaId f, const Assignment& assignment) {
  std::unordered_map<std::uint32_t, bool> value;
  for (auto g : topo_order(store, f)) {
    const auto& n = store.node(g);
    bool v = false;
    switch (n.kind) {
      case Kind::Var: {
        auto it = assignment.find(store.name(g));
        if (it == assignment.end()) throw EvaluationError("unassigned variable '" + store.name(g) + "'");
        v = it->second;
        break;
      }
      case Kind::Top: v = true; break;
      case Kind::Bot: v = false; break;
      case Kind::Not: v = !value.at(n.left.value); break;
      case Kind::And: v = value.at(n.left.value) && value.at(n.right.value); break;
      case Kind::Or: v = value.at(n.left.value) || value.at(n.right.value); break;
    }
    value[g.value] = v;
  }
  return value.at(f.value);
}

std::size_t connective_count(const FormulaStore& store, FormulaId f) {
  auto order = topo_order(store, f);
  return static_cast<std::size_t>(std::count_if(order.begin(), order.end(), [&](FormulaId g) {
    auto k = store.kind(g);
    return k == Kind::And || k == Kind::Or;
  }));
}

std::size_t dag_size(const FormulaStore& store, FormulaId f) { return topo_order(store, f).size(); }

std::vector<std::string> variables(const FormulaStore& store, std::span<const FormulaId> roots) {
  std::vector<std::string> out;
  for (auto g : topo_order(store, roots))
    if (store.kind(g) == Kind::Var) out.push_back(store.name(g));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> variables(const FormulaStore& store, FormulaId f) {
  const FormulaId roots[] = {f};
  return variables(store, roots);
}

bool contains_constant(const FormulaStore& store, FormulaId f) {
  auto order = topo_order(store, f);
  return std::any_of(order.begin(), order.end(), [&](FormulaId g) {
    auto k = store.kind(g);
    return k == Kind::Top || k == Kind::Bot;
  });
}

BatchEvaluator::BatchEvaluator(const FormulaStore& store, FormulaId root, std::vector<std::string> order)
    : order_(std::move(order)) {
  std::unordered_map<std::string_view, std::uint32_t> var_index;
  for (std::uint32_t i = 0; i < order_.size(); ++i) var_index.emplace(order_[i], i);
  std::unordered_map<std::uint32_t, std::uint32_t> slot;
  for (auto g : topo_order(store, root)) {
    const auto& n = store.node(g);
    Step s{n.kind, 0, 0};
    switch (n.kind) {
      case Kind::Var: {
        auto it = var_index.find(store.name(g));
        if (it == var_index.end()) throw EvaluationError("unassigned variable '" + store.name(g) + "'");
        s.a = it->second;
        break;
      }
      case Kind::Not: s.a = slot.at(n.left.value); break;
      case Kind::And:
      case Kind::Or:
        s.a = slot.at(n.left.value);
        s.b = slot.at(n.right.value);
        break;
      default: break;
    }
    slot[g.value] = static_cast<std::uint32_t>(steps_.size());
    steps_.push_back(s);
  }
}

std::uint64_t BatchEvaluator::run(std::span<const std::uint64_t> inputs) const {
  if (inputs.size() != order_.size()) throw EvaluationError("input width does not match variable order");
  std::vector<std::uint64_t> v(steps_.size());
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const auto& s = steps_[i];
    switch (s.kind) {
      case Kind::Var: v[i] = inputs[s.a]; break;
      case Kind::Top: v[i] = ~std::uint64_t{0}; break;
      case Kind::Bot: v[i] = 0; break;
      case Kind::Not: v[i] = ~v[s.a]; break;
      case Kind::And: v[i] = v[s.a] & v[s.b]; break;
      case Kind::Or: v[i] = v[s.a] | v[s.b]; break;
    }
  }
  return v.back();
}

}  // namespace ol
