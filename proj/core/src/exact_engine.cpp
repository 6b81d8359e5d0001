#include "hybridbn/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hybridbn/assignment.hpp"
#include "hybridbn/errors.hpp"

namespace hbn {

namespace {

// CPD as a factor over its sorted family scope.
TableFactor cpd_factor(const HybridNetwork& net, const Cpd& cpd) {
  std::vector<int> family = cpd.parents;
  family.push_back(cpd.child);
  TableFactor f(family, net);
  const int child_pos = f.scope_pos(cpd.child);
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
  return f;
}

// Parent pointers and a root-first visiting order of the clique tree.
void tree_order(const CliqueTree& tree, int root, std::vector<int>& order,
                std::vector<int>& parent_edge) {
  order.clear();
  parent_edge.assign(tree.cliques.size(), -1);
  std::vector<char> seen(tree.cliques.size(), 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    order.push_back(i);
    for (int e : tree.adjacency[i]) {
      const int j = tree.neighbor_across(e, i);
      if (!seen[j]) {
        seen[j] = 1;
        parent_edge[j] = e;
        stack.push_back(j);
      }
    }
  }
}

}  // namespace

ExactResult exact_propagate(const HybridNetwork& net, const Evidence& ev, int root) {
  if (!net.fully_discrete()) {
    throw std::invalid_argument("exact propagation requires a fully discrete network");
  }
  {
    auto rep = validate_evidence(net, ev);
    if (!rep.ok()) throw std::invalid_argument("bad evidence: " + rep.to_string());
  }

  ExactResult res;
  res.tree = build_clique_tree(net);
  const CliqueTree& tree = res.tree;
  const int nc = tree.num_cliques();
  if (root < 0 || root >= nc) throw std::invalid_argument("bad root clique index");

  // Evidence-reduced initial potentials over full clique scopes.
  std::vector<TableFactor> pots(nc);
  for (int i = 0; i < nc; ++i) {
    TableFactor pot(tree.cliques[i].vars, net);
    std::fill(pot.values.begin(), pot.values.end(), 1.0);
    for (int c : tree.cliques[i].cpd_indices) {
      pot = pot.product(cpd_factor(net, net.cpds[c]));
    }
    pots[i] = pot.reduce(ev);
  }

  std::vector<int> order, parent_edge;
  tree_order(tree, root, order, parent_edge);

  // messages[2e] flows a->b, messages[2e+1] flows b->a.
  std::vector<TableFactor> messages(2 * tree.edges.size());
  auto slot = [&](int e, int from) {
    return 2 * e + (tree.edges[e].a == from ? 0 : 1);
  };
  auto send = [&](int from, int e) {
    TableFactor t = pots[from];
    for (int e2 : tree.adjacency[from]) {
      if (e2 != e) t = t.product(messages[slot(e2, tree.neighbor_across(e2, from))]);
    }
    std::vector<int> drop;
    for (int v : tree.cliques[from].vars) {
      if (!std::binary_search(tree.edges[e].sepset.begin(), tree.edges[e].sepset.end(), v)) {
        drop.push_back(v);
      }
    }
    messages[slot(e, from)] = t.marginalize(drop);
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {  // collect
    if (parent_edge[*it] >= 0) send(*it, parent_edge[*it]);
  }
  for (int i : order) {  // distribute
    for (int e : tree.adjacency[i]) {
      if (e != parent_edge[i]) send(i, e);
    }
  }

  res.clique_beliefs.resize(nc);
  res.log_evidence = 0.0;
  for (int i = 0; i < nc; ++i) {
    TableFactor b = pots[i];
    for (int e : tree.adjacency[i]) {
      b = b.product(messages[slot(e, tree.neighbor_across(e, i))]);
    }
    const double z = b.total();
    if (i == root) {
      if (!(z > 0.0)) throw DegeneracyError("evidence has zero probability");
      res.log_evidence = std::log(z);
    }
    b.normalize();
    res.clique_beliefs[i] = std::move(b);
  }

  res.sepset_beliefs.resize(tree.edges.size());
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    TableFactor s = messages[2 * e].product(messages[2 * e + 1]);
    s.normalize();
    res.sepset_beliefs[e] = std::move(s);
  }
  return res;
}

std::vector<double> exact_marginal(const ExactResult& res, int var) {
  int best = -1;
  for (int i = 0; i < res.tree.num_cliques(); ++i) {
    const auto& vars = res.tree.cliques[i].vars;
    if (!std::binary_search(vars.begin(), vars.end(), var)) continue;
    if (best < 0 || vars.size() < res.tree.cliques[best].vars.size()) best = i;
  }
  if (best < 0) throw std::invalid_argument("variable not in any clique");

  std::vector<int> drop;
  for (int v : res.tree.cliques[best].vars) {
    if (v != var) drop.push_back(v);
  }
  TableFactor m = res.clique_beliefs[best].marginalize(drop);
  m.normalize();
  return m.values;
}

double max_calibration_error(const ExactResult& res) {
  double worst = 0.0;
  for (std::size_t e = 0; e < res.tree.edges.size(); ++e) {
    const auto& edge = res.tree.edges[e];
    auto project = [&](int clique) {
      std::vector<int> drop;
      for (int v : res.tree.cliques[clique].vars) {
        if (!std::binary_search(edge.sepset.begin(), edge.sepset.end(), v)) {
          drop.push_back(v);
        }
      }
      return res.clique_beliefs[clique].marginalize(drop);
    };
    const TableFactor pa = project(edge.a);
    const TableFactor pb = project(edge.b);
    for (std::size_t k = 0; k < pa.values.size(); ++k) {
      worst = std::max(worst, std::abs(pa.values[k] - pb.values[k]));
    }
  }
  return worst;
}

}  // namespace hbn
