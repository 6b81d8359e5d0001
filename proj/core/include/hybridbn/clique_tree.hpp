#pragma once

#include <string>
#include <vector>

#include "hybridbn/network.hpp"

namespace hbn {

struct Clique {
  std::vector<int> vars;        // sorted ascending
  std::vector<int> cpd_indices; // CPDs ascribed to this clique
};

struct TreeEdge {
  int a, b;                 // clique indices, a < b
  std::vector<int> sepset;  // sorted intersection of the two clique scopes
};

/// Join tree over the moralized, triangulated network.
struct CliqueTree {
  std::vector<Clique> cliques;
  std::vector<TreeEdge> edges;
  std::vector<std::vector<int>> adjacency;  // clique index -> edge indices
  std::vector<std::string> warnings;        // e.g. clique with many continuous vars

  int num_cliques() const { return static_cast<int>(cliques.size()); }
  int edge_between(int i, int j) const;  // -1 if absent
  int neighbor_across(int edge, int from) const;

  /// Every variable's cliques must form a connected subtree.
  bool running_intersection_holds() const;

  std::string to_string(const HybridNetwork& net) const;
};

/// Moral graph adjacency (undirected): parents married, arrows dropped.
std::vector<std::vector<char>> moral_graph(const HybridNetwork& net);

/// Min-fill elimination order over an undirected adjacency matrix.
/// Ties broken by lowest variable id.
std::vector<int> min_fill_order(std::vector<std::vector<char>> adj);

/// Builds the clique tree: moralize, triangulate by min-fill, collect maximal
/// cliques, connect by maximum-sepset-cardinality spanning tree (deterministic
/// Kruskal: weight descending, then lower clique indices first), ascribe each
/// CPD to the smallest covering clique (ties: lowest clique index). Warns on
/// cliques with more than `max_continuous` continuous variables.
CliqueTree build_clique_tree(const HybridNetwork& net, int max_continuous = 4);

}  // namespace hbn
