#include "hybridbn/clique_tree.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace hbn {

int CliqueTree::edge_between(int i, int j) const {
  for (int e : adjacency[i]) {
    if (edges[e].a == j || edges[e].b == j) return e;
  }
  return -1;
}

int CliqueTree::neighbor_across(int edge, int from) const {
  return edges[edge].a == from ? edges[edge].b : edges[edge].a;
}

bool CliqueTree::running_intersection_holds() const {
  // For every variable, the cliques containing it must induce a connected
  // subtree; an edge is usable iff its sepset contains the variable.
  std::vector<int> all_vars;
  for (const auto& c : cliques) all_vars.insert(all_vars.end(), c.vars.begin(), c.vars.end());
  std::sort(all_vars.begin(), all_vars.end());
  all_vars.erase(std::unique(all_vars.begin(), all_vars.end()), all_vars.end());

  for (int v : all_vars) {
    std::vector<int> holding;
    for (int i = 0; i < num_cliques(); ++i) {
      if (std::binary_search(cliques[i].vars.begin(), cliques[i].vars.end(), v)) {
        holding.push_back(i);
      }
    }
    std::vector<char> reached(cliques.size(), 0);
    std::vector<int> stack{holding.front()};
    reached[holding.front()] = 1;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int e : adjacency[i]) {
        if (!std::binary_search(edges[e].sepset.begin(), edges[e].sepset.end(), v)) continue;
        const int j = neighbor_across(e, i);
        if (!reached[j]) {
          reached[j] = 1;
          stack.push_back(j);
        }
      }
    }
    for (int i : holding) {
      if (!reached[i]) return false;
    }
  }
  return true;
}

std::string CliqueTree::to_string(const HybridNetwork& net) const {
  std::ostringstream os;
  for (int i = 0; i < num_cliques(); ++i) {
    os << "C" << i << " {";
    for (std::size_t k = 0; k < cliques[i].vars.size(); ++k) {
      if (k) os << ", ";
      os << net.var(cliques[i].vars[k]).name;
    }
    os << "}  factors:";
    if (cliques[i].cpd_indices.empty()) os << " -";
    for (int c : cliques[i].cpd_indices) os << ' ' << net.var(c).name;
    os << '\n';
  }
  for (const auto& e : edges) {
    os << "C" << e.a << " -- C" << e.b << "  sepset {";
    for (std::size_t k = 0; k < e.sepset.size(); ++k) {
      if (k) os << ", ";
      os << net.var(e.sepset[k]).name;
    }
    os << "}\n";
  }
  for (const auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

std::vector<std::vector<char>> moral_graph(const HybridNetwork& net) {
  const int n = net.num_variables();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& c : net.cpds) {
    std::vector<int> family = c.parents;
    family.push_back(c.child);
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        adj[family[i]][family[j]] = adj[family[j]][family[i]] = 1;
      }
    }
  }
  return adj;
}

namespace {

// Fill edges needed to eliminate v from the working graph.
int fill_count(const std::vector<std::vector<char>>& adj,
               const std::vector<char>& gone, int v) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> nbrs;
  for (int u = 0; u < n; ++u) {
    if (u != v && !gone[u] && adj[v][u]) nbrs.push_back(u);
  }
  int fill = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
      if (!adj[nbrs[i]][nbrs[j]]) ++fill;
    }
  }
  return fill;
}

void eliminate(std::vector<std::vector<char>>& adj, std::vector<char>& gone, int v) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> nbrs;
  for (int u = 0; u < n; ++u) {
    if (u != v && !gone[u] && adj[v][u]) nbrs.push_back(u);
  }
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
      adj[nbrs[i]][nbrs[j]] = adj[nbrs[j]][nbrs[i]] = 1;
    }
  }
  gone[v] = 1;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

std::vector<int> min_fill_order(std::vector<std::vector<char>> adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<char> gone(n, 0);
  std::vector<int> order;
  order.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1, best_fill = 0;
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      const int f = fill_count(adj, gone, v);
      if (best < 0 || f < best_fill) {  // ties keep the lowest id
        best = v;
        best_fill = f;
      }
    }
    eliminate(adj, gone, best);
    order.push_back(best);
  }
  return order;
}

CliqueTree build_clique_tree(const HybridNetwork& net, int max_continuous) {
  CliqueTree tree;
  const int n = net.num_variables();
  auto adj = moral_graph(net);
  const auto order = min_fill_order(adj);

  // Replay the elimination on the same graph; each variable's elimination
  // neighborhood is a clique of the triangulation.
  std::vector<char> gone(n, 0);
  std::vector<std::vector<int>> candidates;
  for (int v : order) {
    std::vector<int> clique{v};
    for (int u = 0; u < n; ++u) {
      if (u != v && !gone[u] && adj[v][u]) clique.push_back(u);
    }
    std::sort(clique.begin(), clique.end());
    candidates.push_back(std::move(clique));
    eliminate(adj, gone, v);
  }

  // Keep only maximal candidates; on duplicates the earliest survives.
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
      if (i == j) continue;
      const bool subset = std::includes(candidates[j].begin(), candidates[j].end(),
                                        candidates[i].begin(), candidates[i].end());
      if (subset && (candidates[j].size() > candidates[i].size() || j < i)) {
        maximal = false;
      }
    }
    if (maximal) tree.cliques.push_back({candidates[i], {}});
  }

  // Spanning tree over all clique pairs, preferring large sepsets. Zero
  // weight edges are allowed so disconnected networks still yield one tree.
  struct Cand {
    int w, a, b;
  };
  std::vector<Cand> cand;
  for (int a = 0; a < tree.num_cliques(); ++a) {
    for (int b = a + 1; b < tree.num_cliques(); ++b) {
      std::vector<int> inter;
      std::set_intersection(tree.cliques[a].vars.begin(), tree.cliques[a].vars.end(),
                            tree.cliques[b].vars.begin(), tree.cliques[b].vars.end(),
                            std::back_inserter(inter));
      cand.push_back({static_cast<int>(inter.size()), a, b});
    }
  }
  std::stable_sort(cand.begin(), cand.end(), [](const Cand& x, const Cand& y) {
    if (x.w != y.w) return x.w > y.w;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  UnionFind uf(tree.num_cliques());
  tree.adjacency.assign(tree.cliques.size(), {});
  for (const auto& c : cand) {
    if (!uf.unite(c.a, c.b)) continue;
    std::vector<int> sepset;
    std::set_intersection(tree.cliques[c.a].vars.begin(), tree.cliques[c.a].vars.end(),
                          tree.cliques[c.b].vars.begin(), tree.cliques[c.b].vars.end(),
                          std::back_inserter(sepset));
    const int e = static_cast<int>(tree.edges.size());
    tree.edges.push_back({c.a, c.b, std::move(sepset)});
    tree.adjacency[c.a].push_back(e);
    tree.adjacency[c.b].push_back(e);
  }

  // Each factor lives in the smallest clique covering its family.
  for (const auto& cpd : net.cpds) {
    std::vector<int> family = cpd.parents;
    family.push_back(cpd.child);
    std::sort(family.begin(), family.end());
    int best = -1;
    for (int i = 0; i < tree.num_cliques(); ++i) {
      if (!std::includes(tree.cliques[i].vars.begin(), tree.cliques[i].vars.end(),
                         family.begin(), family.end())) {
        continue;
      }
      if (best < 0 || tree.cliques[i].vars.size() < tree.cliques[best].vars.size()) {
        best = i;
      }
    }
    if (best < 0) throw std::logic_error("no clique covers a cpd family");
    tree.cliques[best].cpd_indices.push_back(cpd.child);
  }

  for (int i = 0; i < tree.num_cliques(); ++i) {
    int cont = 0;
    for (int v : tree.cliques[i].vars) {
      if (net.var(v).is_continuous()) ++cont;
    }
    if (cont > max_continuous) {
      tree.warnings.push_back("clique " + std::to_string(i) + " holds " +
                              std::to_string(cont) +
                              " continuous variables; estimates may be coarse");
    }
  }
  return tree;
}

}  // namespace hbn
