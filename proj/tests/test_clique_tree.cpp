#include <algorithm>
#include <set>

#include "doctest.h"
#include "hybridbn/benchmark_nets.hpp"
#include "hybridbn/clique_tree.hpp"

using namespace hbn;

namespace {

bool clique_covers(const Clique& c, const Cpd& cpd) {
  auto has = [&](int v) {
    return std::binary_search(c.vars.begin(), c.vars.end(), v);
  };
  if (!has(cpd.child)) return false;
  return std::all_of(cpd.parents.begin(), cpd.parents.end(), has);
}

}  // namespace

TEST_SUITE("clique-tree") {

TEST_CASE("moral graph marries parents") {
  // Collider 0 -> 2 <- 1: moralization must connect 0 and 1.
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1"}));
  net.add_variable(Variable::discrete(1, "B", {"0", "1"}));
  net.add_variable(Variable::discrete(2, "C", {"0", "1"}));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.5, 0.5}}};
  net.add_cpd(a);
  Cpd b;
  b.child = 1;
  b.body = TableCpd{{{0.5, 0.5}}};
  net.add_cpd(b);
  Cpd c;
  c.child = 2;
  c.parents = {0, 1};
  c.body = TableCpd{{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}};
  net.add_cpd(c);

  auto adj = moral_graph(net);
  CHECK(adj[0][1]);
  CHECK(adj[1][0]);
  CHECK(adj[0][2]);
  CHECK(adj[1][2]);
  CHECK_FALSE(adj[0][0]);

  CliqueTree tree = build_clique_tree(net);
  REQUIRE(tree.num_cliques() == 1);
  CHECK(tree.cliques[0].vars == std::vector<int>{0, 1, 2});
}

TEST_CASE("chain yields pairwise cliques with singleton sepsets") {
  HybridNetwork net;
  for (int i = 0; i < 4; ++i) {
    net.add_variable(Variable::discrete(i, "V" + std::to_string(i), {"0", "1"}));
  }
  for (int i = 0; i < 4; ++i) {
    Cpd c;
    c.child = i;
    if (i == 0) {
      c.body = TableCpd{{{0.5, 0.5}}};
    } else {
      c.parents = {i - 1};
      c.body = TableCpd{{{0.7, 0.3}, {0.4, 0.6}}};
    }
    net.add_cpd(c);
  }
  CliqueTree tree = build_clique_tree(net);
  REQUIRE(tree.num_cliques() == 3);
  REQUIRE(tree.edges.size() == 2);
  for (const auto& e : tree.edges) CHECK(e.sepset.size() == 1);
  CHECK(tree.running_intersection_holds());
}

TEST_CASE("every cpd lands in exactly one covering clique") {
  RandomStream rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    HybridNetwork net = random_discrete_network(2 + static_cast<int>(rng.index(9)), 3, rng);
    CliqueTree tree = build_clique_tree(net);
    std::vector<int> assigned(net.num_variables(), 0);
    for (const auto& clique : tree.cliques) {
      for (int ci : clique.cpd_indices) {
        ++assigned[ci];
        CHECK(clique_covers(clique, net.cpds[ci]));
      }
    }
    for (int v = 0; v < net.num_variables(); ++v) CHECK(assigned[v] == 1);
  }
}

TEST_CASE("running intersection holds on random networks") {
  RandomStream rng(33);
  for (int rep = 0; rep < 100; ++rep) {
    HybridNetwork net = random_discrete_network(2 + static_cast<int>(rng.index(11)), 4, rng);
    CliqueTree tree = build_clique_tree(net);
    CHECK(tree.running_intersection_holds());
    CHECK(tree.edges.size() + 1 == static_cast<std::size_t>(tree.num_cliques()));
  }
}

TEST_CASE("construction is deterministic") {
  RandomStream rng(5);
  HybridNetwork net = random_discrete_network(10, 3, rng);
  CliqueTree a = build_clique_tree(net);
  CliqueTree b = build_clique_tree(net);
  REQUIRE(a.num_cliques() == b.num_cliques());
  for (int i = 0; i < a.num_cliques(); ++i) {
    CHECK(a.cliques[i].vars == b.cliques[i].vars);
    CHECK(a.cliques[i].cpd_indices == b.cliques[i].cpd_indices);
  }
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t e = 0; e < a.edges.size(); ++e) {
    CHECK(a.edges[e].a == b.edges[e].a);
    CHECK(a.edges[e].b == b.edges[e].b);
    CHECK(a.edges[e].sepset == b.edges[e].sepset);
  }
}

TEST_CASE("disconnected networks still produce one spanning tree") {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1"}));
  net.add_variable(Variable::discrete(1, "B", {"0", "1"}));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.5, 0.5}}};
  net.add_cpd(a);
  Cpd b;
  b.child = 1;
  b.body = TableCpd{{{0.3, 0.7}}};
  net.add_cpd(b);
  CliqueTree tree = build_clique_tree(net);
  REQUIRE(tree.num_cliques() == 2);
  REQUIRE(tree.edges.size() == 1);
  CHECK(tree.edges[0].sepset.empty());
  CHECK(tree.running_intersection_holds());
}

TEST_CASE("min-fill prefers the zero-fill vertex") {
  // Star: center 0 adjacent to 1,2,3 (leaves pairwise nonadjacent).
  // Eliminating a leaf adds no fill-in; eliminating the center adds three
  // edges. The order must start with a leaf, and ties go to the lowest id.
  std::vector<std::vector<char>> adj(4, std::vector<char>(4, 0));
  for (int leaf : {1, 2, 3}) adj[0][leaf] = adj[leaf][0] = 1;
  auto order = min_fill_order(adj);
  CHECK(order[0] == 1);
}

TEST_CASE("hybrid cliques with many continuous variables get a warning") {
  HybridNetwork net = traffic_network();
  CliqueTree tree = build_clique_tree(net, /*max_continuous=*/1);
  CHECK_FALSE(tree.warnings.empty());
  CHECK(build_clique_tree(net).running_intersection_holds());
}

}  // TEST_SUITE
