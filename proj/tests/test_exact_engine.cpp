#include <cmath>

#include "doctest.h"
#include "hybridbn/benchmark_nets.hpp"
#include "hybridbn/errors.hpp"
#include "hybridbn/exact_engine.hpp"
#include "hybridbn/table_factor.hpp"

using namespace hbn;

namespace {

HybridNetwork chain_ab() {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1"}));
  net.add_variable(Variable::discrete(1, "B", {"0", "1"}));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.5, 0.5}}};
  net.add_cpd(a);
  Cpd b;
  b.child = 1;
  b.parents = {0};
  b.body = TableCpd{{{0.9, 0.1}, {0.2, 0.8}}};
  net.add_cpd(b);
  return net;
}

}  // namespace

TEST_SUITE("exact-engine") {

TEST_CASE("two-variable chain posterior by hand") {
  HybridNetwork net = chain_ab();
  Evidence ev;
  ev.values[1] = 0.0;
  ExactResult res = exact_propagate(net, ev);
  auto m = exact_marginal(res, 0);
  // P(A=0 | B=0) = 0.45 / (0.45 + 0.10).
  CHECK(m[0] == doctest::Approx(0.45 / 0.55).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(0.10 / 0.55).epsilon(1e-12));
  CHECK(res.log_evidence == doctest::Approx(std::log(0.55)).epsilon(1e-12));
}

TEST_CASE("no evidence gives the prior and zero log evidence") {
  HybridNetwork net = chain_ab();
  ExactResult res = exact_propagate(net, {});
  auto a = exact_marginal(res, 0);
  CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-12));
  auto b = exact_marginal(res, 1);
  CHECK(b[0] == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(res.log_evidence == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("marginals match brute force on random networks") {
  RandomStream rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    HybridNetwork net = random_discrete_network(3 + static_cast<int>(rng.index(8)), 3, rng);
    Evidence ev = random_discrete_evidence(net, static_cast<int>(rng.index(3)), rng);
    ExactResult res;
    try {
      res = exact_propagate(net, ev);
    } catch (const DegeneracyError&) {
      continue;  // evidence with zero mass is legitimate on random nets
    }
    for (int v = 0; v < net.num_variables(); ++v) {
      auto got = exact_marginal(res, v);
      auto want = brute_force_marginal(net, v, ev);
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("adjacent cliques agree on their sepsets after propagation") {
  RandomStream rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    HybridNetwork net = random_discrete_network(8, 3, rng);
    Evidence ev = random_discrete_evidence(net, 1, rng);
    try {
      ExactResult res = exact_propagate(net, ev);
      CHECK(max_calibration_error(res) < 1e-12);
    } catch (const DegeneracyError&) {
    }
  }
}

TEST_CASE("log evidence equals the brute-force evidence mass") {
  RandomStream rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    HybridNetwork net = random_discrete_network(6, 2, rng);
    Evidence ev = random_discrete_evidence(net, 2, rng);
    TableFactor joint = brute_force_joint(net);
    const double mass = joint.reduce(ev).total();
    if (mass <= 0.0) {
      CHECK_THROWS_AS(exact_propagate(net, ev), DegeneracyError);
    } else {
      ExactResult res = exact_propagate(net, ev);
      CHECK(res.log_evidence == doctest::Approx(std::log(mass)).epsilon(1e-9));
    }
  }
}

TEST_CASE("impossible evidence raises a degeneracy error") {
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
  b.body = TableCpd{{{1.0, 0.0}, {0.5, 0.5}}};
  net.add_cpd(b);
  Evidence ev;
  ev.values[1] = 1.0;  // requires A=1, which has probability 0
  CHECK_THROWS_AS(exact_propagate(net, ev), DegeneracyError);
}

TEST_CASE("continuous networks are refused") {
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", 0.0, 1.0));
  Cpd x;
  x.child = 0;
  x.body = UniformCpd{};
  net.add_cpd(x);
  CHECK_THROWS_AS(exact_propagate(net, {}), std::invalid_argument);
}

TEST_CASE("root choice does not change the answer") {
  RandomStream rng(55);
  HybridNetwork net = random_discrete_network(9, 3, rng);
  Evidence ev = random_discrete_evidence(net, 2, rng);
  ExactResult r0, r1;
  try {
    r0 = exact_propagate(net, ev, 0);
  } catch (const DegeneracyError&) {
    return;
  }
  const int last = r0.tree.num_cliques() - 1;
  r1 = exact_propagate(net, ev, last);
  for (int v = 0; v < net.num_variables(); ++v) {
    auto a = exact_marginal(r0, v);
    auto b = exact_marginal(r1, v);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
