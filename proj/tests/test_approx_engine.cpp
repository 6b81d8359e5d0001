#include <cmath>
#include <vector>

#include "doctest.h"
#include "hybridbn/approx_engine.hpp"
#include "hybridbn/discretize.hpp"
#include "hybridbn/errors.hpp"
#include "hybridbn/exact_engine.hpp"
#include "hybridbn/metrics.hpp"

using namespace hbn;

namespace {

// A -> B -> C, all binary.
HybridNetwork chain3() {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1"}));
  net.add_variable(Variable::discrete(1, "B", {"0", "1"}));
  net.add_variable(Variable::discrete(2, "C", {"0", "1"}));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.3, 0.7}}};
  net.add_cpd(a);
  Cpd b;
  b.child = 1;
  b.parents = {0};
  b.body = TableCpd{{{0.9, 0.1}, {0.2, 0.8}}};
  net.add_cpd(b);
  Cpd c;
  c.child = 2;
  c.parents = {1};
  c.body = TableCpd{{{0.6, 0.4}, {0.1, 0.9}}};
  net.add_cpd(c);
  return net;
}

// X -> Y -> Z linear-Gaussian chain; discretized exact inference is the
// reference for the sampled engine.
HybridNetwork clg_chain() {
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", -6.0, 6.0));
  net.add_variable(Variable::continuous(1, "Y", -8.0, 8.0));
  net.add_variable(Variable::continuous(2, "Z", -10.0, 10.0));
  Cpd x;
  x.child = 0;
  x.body = ClgCpd{{ClgBlock{0.0, {}, 1.0}}};
  net.add_cpd(x);
  Cpd y;
  y.child = 1;
  y.parents = {0};
  y.body = ClgCpd{{ClgBlock{0.0, {1.0}, 0.5}}};
  net.add_cpd(y);
  Cpd z;
  z.child = 2;
  z.parents = {1};
  z.body = ClgCpd{{ClgBlock{0.0, {1.0}, 0.5}}};
  net.add_cpd(z);
  return net;
}

// Single-leaf tree over one binary variable with the given pmf.
DensityTree table_tree(int var, std::vector<double> pmf) {
  DensityTree t;
  t.scope = {var};
  t.cards = {static_cast<int>(pmf.size())};
  DtNode leaf;
  leaf.leaf_disc = {var};
  leaf.pmfs = {std::move(pmf)};
  t.nodes = {leaf};
  t.root = 0;
  return t;
}

// Mean KL over all non-evidence variables against discretized-exact
// reference marginals (bin grids match config.histogram_bins).
double reference_kl(const ApproxState& st) {
  const HybridNetwork& net = *st.net;
  const int bins = st.config.histogram_bins;
  HybridNetwork dnet = discretize_network(net, bins);
  Evidence dev = discretize_evidence(net, st.evidence, bins);
  ExactResult exact = exact_propagate(dnet, dev);
  double total = 0.0;
  int count = 0;
  for (int v = 0; v < net.num_variables(); ++v) {
    if (st.evidence.values.count(v)) continue;
    total += kl_divergence(exact_marginal(exact, v), approx_marginal(st, v));
    ++count;
  }
  return total / count;
}

}  // namespace

TEST_SUITE("approx-engine") {

TEST_CASE("refinement target is the product of its factor evaluations") {
  HybridNetwork net = chain3();
  ApproxConfig cfg;
  cfg.samples_per_clique = 400;
  ApproxState st = approx_init(net, Evidence{}, cfg);
  REQUIRE(st.tree.cliques.size() == 2);
  REQUIRE(st.tree.edges.size() == 1);

  // Identify which clique holds {A, B}.
  const int cab = st.tree.cliques[0].vars == std::vector<int>{0, 1} ? 0 : 1;
  const int cbc = 1 - cab;
  REQUIRE(st.tree.cliques[cab].vars == std::vector<int>{0, 1});
  REQUIRE(st.tree.cliques[cbc].vars == std::vector<int>{1, 2});

  // Overwrite the inbound message with a hand-built table so the expected
  // product is known exactly.
  st.messages[st.message_index(0, cbc)] = table_tree(1, {0.3, 0.7});

  const double pa[2] = {0.3, 0.7};
  const double pba[2][2] = {{0.9, 0.1}, {0.2, 0.8}};
  const double msg[2] = {0.3, 0.7};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::vector<double> x{static_cast<double>(a), static_cast<double>(b)};
      const double want = pa[a] * pba[a][b] * msg[b];
      CHECK(st.target_eval(cab, -1, x) == doctest::Approx(want).epsilon(1e-12));
      // Excluding the edge drops exactly the message factor.
      CHECK(st.target_eval(cab, 0, x) ==
            doctest::Approx(pa[a] * pba[a][b]).epsilon(1e-12));
    }
  }

  // The other clique's target: P(c | b) times its inbound message over B.
  st.messages[st.message_index(0, cab)] = table_tree(1, {0.6, 0.4});
  const double pcb[2][2] = {{0.6, 0.4}, {0.1, 0.9}};
  const double msg2[2] = {0.6, 0.4};
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 2; ++c) {
      const std::vector<double> x{static_cast<double>(b), static_cast<double>(c)};
      CHECK(st.target_eval(cbc, -1, x) ==
            doctest::Approx(msg2[b] * pcb[b][c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("evidence substitutes into the target") {
  HybridNetwork net = chain3();
  Evidence ev;
  ev.values[1] = 1.0;  // B = 1
  ApproxConfig cfg;
  cfg.samples_per_clique = 400;
  ApproxState st = approx_init(net, ev, cfg);
  const int cab = st.tree.cliques[0].vars == std::vector<int>{0, 1} ? 0 : 1;
  REQUIRE(st.reduced_scope[cab] == std::vector<int>{0});

  // Reduced sepset is empty, so the target is P(a) P(B=1 | a) alone.
  CHECK(st.target_eval(cab, -1, std::vector<double>{0.0}) ==
        doctest::Approx(0.3 * 0.1).epsilon(1e-12));
  CHECK(st.target_eval(cab, -1, std::vector<double>{1.0}) ==
        doctest::Approx(0.7 * 0.8).epsilon(1e-12));
}

TEST_CASE("calibration alone gets a discrete chain roughly right") {
  HybridNetwork net = chain3();
  Evidence ev;
  ev.values[2] = 1.0;
  ApproxConfig cfg;
  cfg.samples_per_clique = 10000;
  cfg.dt.min_leaf_samples = 50;
  ApproxState st = approx_init(net, ev, cfg);

  ExactResult exact = exact_propagate(net, ev);
  for (int v = 0; v < 2; ++v) {
    const double tv = total_variation(exact_marginal(exact, v), approx_marginal(st, v));
    CHECK(tv <= 0.05);
  }
}

TEST_CASE("two refined passes pin a discrete chain down") {
  HybridNetwork net = chain3();
  Evidence ev;
  ev.values[2] = 0.0;
  ApproxConfig cfg;
  cfg.samples_per_clique = 3000;
  cfg.early_stop_tv = 0.0;
  ApproxState st = approx_init(net, ev, cfg);
  approx_run(st, 3);

  ExactResult exact = exact_propagate(net, ev);
  for (int v = 0; v < 2; ++v) {
    const double tv = total_variation(exact_marginal(exact, v), approx_marginal(st, v));
    CHECK(tv <= 0.03);
  }
}

TEST_CASE("messages approximate sepset marginals") {
  HybridNetwork net = chain3();
  ApproxConfig cfg;
  cfg.samples_per_clique = 5000;
  cfg.early_stop_tv = 0.0;
  ApproxState st = approx_init(net, Evidence{}, cfg);
  approx_run(st, 3);

  const int cab = st.tree.cliques[0].vars == std::vector<int>{0, 1} ? 0 : 1;
  const DensityTree& msg = st.messages[st.message_index(0, cab)];
  REQUIRE(st.message_set[st.message_index(0, cab)]);
  auto pmf = dt_discrete_marginal(msg, 1);

  // P(B) = sum_a P(a) P(b | a) = (0.41, 0.59).
  CHECK(total_variation(pmf, std::vector<double>{0.41, 0.59}) <= 0.05);
}

TEST_CASE("a no-evidence run reproduces the prior") {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1", "2"}));
  net.add_variable(Variable::discrete(1, "B", {"0", "1"}));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.2, 0.5, 0.3}}};
  net.add_cpd(a);
  Cpd b;
  b.child = 1;
  b.parents = {0};
  b.body = TableCpd{{{0.9, 0.1}, {0.5, 0.5}, {0.2, 0.8}}};
  net.add_cpd(b);

  ApproxConfig cfg;
  cfg.samples_per_clique = 5000;
  cfg.dt.min_leaf_samples = 100;
  ApproxState st = approx_init(net, Evidence{}, cfg);
  auto pa = approx_marginal(st, 0);
  CHECK(std::abs(pa[0] - 0.2) <= 0.02);
  CHECK(std::abs(pa[1] - 0.5) <= 0.02);
  CHECK(std::abs(pa[2] - 0.3) <= 0.02);
  // P(B=0) = .2*.9 + .5*.5 + .3*.2 = 0.49.
  auto pb = approx_marginal(st, 1);
  CHECK(std::abs(pb[0] - 0.49) <= 0.02);
}

TEST_CASE("iteration tightens a continuous chain's posterior") {
  HybridNetwork net = clg_chain();
  Evidence ev;
  // Far enough into the tail (Z is N(0, 2) a priori) that prior-driven
  // calibration lands visibly off and refinement has room to help.
  ev.values[2] = 5.0;

  double kl_first = 0.0, kl_refined = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    ApproxConfig cfg;
    cfg.seed = seed;
    cfg.samples_per_clique = 1500;
    cfg.early_stop_tv = 0.0;
    cfg.dt.components = 5;
    ApproxState st = approx_init(net, ev, cfg);
    kl_first += reference_kl(st);
    approx_run(st, 4);
    kl_refined += reference_kl(st);
  }
  CHECK(kl_refined / 5 < kl_first / 5);
  CHECK(kl_refined / 5 < 0.1);
}

TEST_CASE("a converged run stays put") {
  HybridNetwork net = chain3();
  Evidence ev;
  ev.values[2] = 1.0;
  ApproxConfig cfg;
  cfg.samples_per_clique = 4000;
  cfg.early_stop_tv = 0.0;
  ApproxState st = approx_init(net, ev, cfg);
  approx_run(st, 4);
  auto before0 = approx_marginal(st, 0);
  auto before1 = approx_marginal(st, 1);
  approx_run(st, 8);
  CHECK(total_variation(before0, approx_marginal(st, 0)) < 0.02);
  CHECK(total_variation(before1, approx_marginal(st, 1)) < 0.02);
}

TEST_CASE("evidence variables give point masses") {
  HybridNetwork net = clg_chain();
  Evidence ev;
  ev.values[0] = 0.3;
  ApproxConfig cfg;
  cfg.samples_per_clique = 300;
  cfg.histogram_bins = 10;
  ApproxState st = approx_init(net, ev, cfg);
  auto hist = approx_marginal(st, 0);
  REQUIRE(hist.size() == 10);
  const int bin = bin_index(-6.0, 6.0, 10, 0.3);
  for (int b = 0; b < 10; ++b) {
    CHECK(hist[b] == (b == bin ? 1.0 : 0.0));
  }

  HybridNetwork dnet = chain3();
  Evidence dev;
  dev.values[1] = 1.0;
  ApproxState dst = approx_init(dnet, dev, cfg);
  CHECK(approx_marginal(dst, 1) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("fully observed networks degenerate gracefully") {
  HybridNetwork net = chain3();
  Evidence ev;
  ev.values[0] = 1.0;
  ev.values[1] = 0.0;
  ev.values[2] = 0.0;
  ApproxConfig cfg;
  cfg.samples_per_clique = 100;
  ApproxState st = approx_init(net, ev, cfg);
  approx_run(st, 3);
  CHECK(approx_marginal(st, 0) == std::vector<double>{0.0, 1.0});
  CHECK(approx_marginal(st, 2) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("impossible evidence degenerates during calibration") {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1"}));
  net.add_variable(Variable::discrete(1, "B", {"0", "1"}));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{1.0, 0.0}}};
  net.add_cpd(a);
  Cpd b;
  b.child = 1;
  b.parents = {0};
  b.body = TableCpd{{{1.0, 0.0}, {0.0, 1.0}}};  // B == A
  net.add_cpd(b);
  Evidence ev;
  ev.values[1] = 1.0;  // requires A = 1, which has probability 0
  ApproxConfig cfg;
  cfg.samples_per_clique = 200;
  CHECK_THROWS_AS(approx_init(net, ev, cfg), DegeneracyError);
}

TEST_CASE("bad evidence is rejected up front") {
  HybridNetwork net = chain3();
  Evidence ev;
  ev.values[7] = 0.0;
  CHECK_THROWS_AS(approx_init(net, ev, ApproxConfig{}), std::invalid_argument);
  Evidence ev2;
  ev2.values[0] = 5.0;
  CHECK_THROWS_AS(approx_init(net, ev2, ApproxConfig{}), std::invalid_argument);
}

TEST_CASE("same seed, same numbers; split runs match whole runs") {
  HybridNetwork net = clg_chain();
  Evidence ev;
  ev.values[2] = 1.0;
  ApproxConfig cfg;
  cfg.seed = 42;
  cfg.samples_per_clique = 500;
  cfg.early_stop_tv = 0.0;
  cfg.dt.components = 4;

  ApproxState a = approx_init(net, ev, cfg);
  approx_run(a, 4);
  ApproxState b = approx_init(net, ev, cfg);
  approx_run(b, 2);
  approx_run(b, 4);

  CHECK(a.passes_done == 4);
  CHECK(b.passes_done == 4);
  CHECK(a.task_counter == b.task_counter);
  for (int v = 0; v < 2; ++v) {
    CHECK(approx_marginal(a, v) == approx_marginal(b, v));
  }

  // A different seed walks a different path.
  cfg.seed = 43;
  ApproxState c = approx_init(net, ev, cfg);
  approx_run(c, 4);
  CHECK(approx_marginal(a, 0) != approx_marginal(c, 0));
}

TEST_CASE("early stopping halts a quiet run") {
  HybridNetwork net = chain3();
  ApproxConfig cfg;
  cfg.samples_per_clique = 2000;
  cfg.early_stop_tv = 0.9;  // any sweep-to-sweep change passes this
  ApproxState st = approx_init(net, Evidence{}, cfg);
  approx_run(st, 10);
  CHECK(st.passes_done == 2);
  REQUIRE(st.trace.size() == 2);
  CHECK(st.trace[0].pass == 1);
  CHECK(st.trace[1].max_tv <= 0.9);
}

}  // TEST_SUITE
