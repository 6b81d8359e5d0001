#include "hybridbn/table_factor.hpp"

#include <algorithm>
#include <stdexcept>

#include "hybridbn/assignment.hpp"
#include "hybridbn/errors.hpp"

namespace hbn {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw std::logic_error("factor scope has duplicate variables");
  }
  return v;
}

}  // namespace

TableFactor::TableFactor(std::vector<int> scope_vars, const HybridNetwork& net)
    : scope(sorted_unique(std::move(scope_vars))) {
  cards.reserve(scope.size());
  for (int v : scope) {
    if (!net.var(v).is_discrete()) {
      throw std::invalid_argument("table factor over continuous variable '" +
                                  net.var(v).name + "'");
    }
    cards.push_back(net.var(v).cardinality);
  }
  values.assign(joint_size(cards), 0.0);
}

TableFactor::TableFactor(std::vector<int> scope_vars, std::vector<int> cardinalities) {
  // Callers pass parallel arrays; sort them together by variable id.
  std::vector<std::size_t> perm(scope_vars.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return scope_vars[a] < scope_vars[b]; });
  scope.resize(scope_vars.size());
  cards.resize(scope_vars.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    scope[i] = scope_vars[perm[i]];
    cards[i] = cardinalities[perm[i]];
  }
  if (std::adjacent_find(scope.begin(), scope.end()) != scope.end()) {
    throw std::logic_error("factor scope has duplicate variables");
  }
  values.assign(joint_size(cards), 0.0);
}

bool TableFactor::has_var(int id) const {
  return std::binary_search(scope.begin(), scope.end(), id);
}

int TableFactor::scope_pos(int id) const {
  auto it = std::lower_bound(scope.begin(), scope.end(), id);
  if (it == scope.end() || *it != id) return -1;
  return static_cast<int>(it - scope.begin());
}

double TableFactor::at(std::span<const int> assignment) const {
  return values[joint_index(cards, assignment)];
}

double& TableFactor::at(std::span<const int> assignment) {
  return values[joint_index(cards, assignment)];
}

TableFactor TableFactor::product(const TableFactor& other) const {
  std::vector<int> union_scope(scope.size() + other.scope.size());
  auto end = std::set_union(scope.begin(), scope.end(), other.scope.begin(),
                            other.scope.end(), union_scope.begin());
  union_scope.resize(static_cast<std::size_t>(end - union_scope.begin()));

  std::vector<int> union_cards(union_scope.size());
  for (std::size_t i = 0; i < union_scope.size(); ++i) {
    const int pa = scope_pos(union_scope[i]);
    union_cards[i] = pa >= 0 ? cards[pa] : other.cards[other.scope_pos(union_scope[i])];
  }

  TableFactor out;
  out.scope = std::move(union_scope);
  out.cards = std::move(union_cards);
  out.values.assign(joint_size(out.cards), 0.0);

  const auto map_a = index_map(scope, out.scope);
  const auto map_b = index_map(other.scope, out.scope);

  std::vector<int> assign(out.scope.size(), 0);
  std::vector<int> sub_a(scope.size()), sub_b(other.scope.size());
  std::size_t idx = 0;
  do {
    for (std::size_t i = 0; i < map_a.size(); ++i) sub_a[i] = assign[map_a[i]];
    for (std::size_t i = 0; i < map_b.size(); ++i) sub_b[i] = assign[map_b[i]];
    out.values[idx++] = at(sub_a) * other.at(sub_b);
  } while (joint_next(out.cards, assign));
  return out;
}

TableFactor TableFactor::marginalize(std::span<const int> drop_vars) const {
  std::vector<int> keep_scope, keep_cards;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    if (std::find(drop_vars.begin(), drop_vars.end(), scope[i]) == drop_vars.end()) {
      keep_scope.push_back(scope[i]);
      keep_cards.push_back(cards[i]);
    }
  }
  TableFactor out;
  out.scope = std::move(keep_scope);
  out.cards = std::move(keep_cards);
  out.values.assign(joint_size(out.cards), 0.0);

  const auto keep_map = index_map(out.scope, scope);
  std::vector<int> assign(scope.size(), 0);
  std::vector<int> sub(out.scope.size());
  std::size_t idx = 0;
  do {
    for (std::size_t i = 0; i < keep_map.size(); ++i) sub[i] = assign[keep_map[i]];
    out.values[joint_index(out.cards, sub)] += values[idx++];
  } while (joint_next(cards, assign));
  return out;
}

TableFactor TableFactor::reduce(const Evidence& ev) const {
  TableFactor out = *this;
  std::vector<std::pair<int, int>> fixed;  // (scope position, required state)
  for (std::size_t i = 0; i < scope.size(); ++i) {
    auto it = ev.values.find(scope[i]);
    if (it != ev.values.end()) {
      fixed.emplace_back(static_cast<int>(i), static_cast<int>(it->second));
    }
  }
  if (fixed.empty()) return out;

  std::vector<int> assign(scope.size(), 0);
  std::size_t idx = 0;
  do {
    for (const auto& [pos, state] : fixed) {
      if (assign[pos] != state) {
        out.values[idx] = 0.0;
        break;
      }
    }
    ++idx;
  } while (joint_next(cards, assign));
  return out;
}

TableFactor TableFactor::extend_to(const std::vector<int>& super_scope,
                                   const std::vector<int>& super_cards) const {
  TableFactor out;
  out.scope = super_scope;
  out.cards = super_cards;
  out.values.assign(joint_size(out.cards), 0.0);

  const auto map = index_map(scope, super_scope);
  std::vector<int> assign(super_scope.size(), 0);
  std::vector<int> sub(scope.size());
  std::size_t idx = 0;
  do {
    for (std::size_t i = 0; i < map.size(); ++i) sub[i] = assign[map[i]];
    out.values[idx++] = at(sub);
  } while (joint_next(out.cards, assign));
  return out;
}

double TableFactor::total() const {
  double t = 0.0;
  for (double v : values) t += v;
  return t;
}

void TableFactor::normalize() {
  const double t = total();
  if (!(t > 0.0)) {
    throw DegeneracyError("factor has no mass to normalize");
  }
  for (double& v : values) v /= t;
}

TableFactor brute_force_joint(const HybridNetwork& net) {
  if (!net.fully_discrete()) {
    throw std::invalid_argument("enumeration requires a fully discrete network");
  }
  std::size_t states = 1;
  for (const auto& v : net.variables) {
    states *= static_cast<std::size_t>(v.cardinality);
    if (states > (1u << 20)) {
      throw RefusalError("joint state space too large to enumerate");
    }
  }

  TableFactor joint;  // scalar 1
  for (const auto& cpd : net.cpds) {
    std::vector<int> family = cpd.parents;
    family.push_back(cpd.child);
    TableFactor f(family, net);

    // Assignment order is the sorted family scope; CPD eval wants
    // declaration order.
    const auto child_pos = f.scope_pos(cpd.child);
    const auto parent_pos = index_map(cpd.parents, f.scope);
    std::vector<int> assign(f.scope.size(), 0);
    std::vector<double> parent_values(cpd.parents.size());
    std::size_t idx = 0;
    do {
      for (std::size_t i = 0; i < parent_pos.size(); ++i) {
        parent_values[i] = static_cast<double>(assign[parent_pos[i]]);
      }
      f.values[idx++] =
          cpd.eval(net, static_cast<double>(assign[child_pos]), parent_values);
    } while (joint_next(f.cards, assign));

    joint = joint.product(f);
  }
  return joint;
}

std::vector<double> brute_force_marginal(const HybridNetwork& net, int var,
                                         const Evidence& ev) {
  TableFactor joint = brute_force_joint(net).reduce(ev);
  std::vector<int> drop;
  for (int v : joint.scope) {
    if (v != var) drop.push_back(v);
  }
  TableFactor m = joint.marginalize(drop);
  m.normalize();
  return m.values;
}

}  // namespace hbn
