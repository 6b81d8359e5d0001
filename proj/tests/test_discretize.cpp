#include <cmath>
#include <vector>

#include "doctest.h"
#include "hybridbn/benchmark_nets.hpp"
#include "hybridbn/clique_tree.hpp"
#include "hybridbn/discretize.hpp"
#include "hybridbn/exact_engine.hpp"
#include "hybridbn/network.hpp"

using namespace hbn;

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_SUITE("discretize") {

TEST_CASE("bin index and midpoint") {
  CHECK(bin_index(0.0, 10.0, 10, 0.05) == 0);
  CHECK(bin_index(0.0, 10.0, 10, 9.99) == 9);
  CHECK(bin_index(0.0, 10.0, 10, 10.0) == 9);   // upper edge -> last bin
  CHECK(bin_index(0.0, 10.0, 10, -3.0) == 0);   // clamped below
  CHECK(bin_index(0.0, 10.0, 10, 42.0) == 9);   // clamped above
  CHECK(bin_index(0.0, 10.0, 10, 1.0) == 1);    // interior edge -> upper bin
  CHECK(bin_midpoint(0.0, 10.0, 10, 0) == doctest::Approx(0.5));
  CHECK(bin_midpoint(0.0, 10.0, 10, 9) == doctest::Approx(9.5));
  CHECK(bin_midpoint(-1.0, 1.0, 4, 2) == doctest::Approx(0.25));
}

TEST_CASE("a narrow Gaussian lands where the cdf says") {
  // X ~ N(50, 1) on [0, 100], 100 unit bins: the two center bins straddle
  // the mean and each hold Phi(1) - Phi(0) = 0.341345 of the mass.
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", 0.0, 100.0));
  Cpd x;
  x.child = 0;
  x.body = ClgCpd{{ClgBlock{50.0, {}, 1.0}}};
  net.add_cpd(x);

  HybridNetwork dnet = discretize_network(net, 100);
  REQUIRE(dnet.num_variables() == 1);
  REQUIRE(dnet.var(0).is_discrete());
  REQUIRE(dnet.var(0).cardinality == 100);

  const auto& rows = std::get<TableCpd>(dnet.cpds[0].body).rows;
  REQUIRE(rows.size() == 1);
  const double phi01 = std_normal_cdf(1.0) - std_normal_cdf(0.0);
  CHECK(rows[0][49] == doctest::Approx(phi01).epsilon(1e-4));
  CHECK(rows[0][50] == doctest::Approx(phi01).epsilon(1e-4));

  // Every bin must equal the cdf difference across its edges.
  for (int b = 1; b < 99; ++b) {
    const double want = std_normal_cdf(b + 1 - 50.0) - std_normal_cdf(b - 50.0);
    CHECK(rows[0][b] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("tail mass folds into the boundary bins") {
  // N(0, 1) on [0, 10]: the whole left half of the density belongs to bin 0.
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", 0.0, 10.0));
  Cpd x;
  x.child = 0;
  x.body = ClgCpd{{ClgBlock{0.0, {}, 1.0}}};
  net.add_cpd(x);
  HybridNetwork dnet = discretize_network(net, 10);
  const auto& row = std::get<TableCpd>(dnet.cpds[0].body).rows[0];
  CHECK(row[0] == doctest::Approx(std_normal_cdf(1.0)).epsilon(1e-9));
  double total = 0.0;
  for (double p : row) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform variables spread evenly") {
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", -2.0, 2.0));
  Cpd x;
  x.child = 0;
  x.body = UniformCpd{};
  net.add_cpd(x);
  HybridNetwork dnet = discretize_network(net, 8);
  const auto& row = std::get<TableCpd>(dnet.cpds[0].body).rows[0];
  for (double p : row) CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("continuous parents enter at their bin midpoints") {
  // X ~ U[0, 4] (4 bins, midpoints .5/1.5/2.5/3.5); Y | X ~ N(2X, 1).
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", 0.0, 4.0));
  net.add_variable(Variable::continuous(1, "Y", -10.0, 20.0));
  Cpd x;
  x.child = 0;
  x.body = UniformCpd{};
  net.add_cpd(x);
  Cpd y;
  y.child = 1;
  y.parents = {0};
  y.body = ClgCpd{{ClgBlock{0.0, {2.0}, 1.0}}};
  net.add_cpd(y);

  const int bins = 4;
  HybridNetwork dnet = discretize_network(net, bins);
  const auto& ycpd = std::get<TableCpd>(dnet.cpds[1].body);
  REQUIRE(ycpd.rows.size() == 4);
  const double w = 30.0 / bins;  // Y bin width
  for (int xb = 0; xb < 4; ++xb) {
    const double mean = 2.0 * bin_midpoint(0.0, 4.0, 4, xb);
    for (int yb = 1; yb < bins - 1; ++yb) {
      const double lo = -10.0 + yb * w, hi = lo + w;
      const double want = std_normal_cdf(hi - mean) - std_normal_cdf(lo - mean);
      CHECK(ycpd.rows[xb][yb] == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("discrete structure passes through untouched") {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"x", "y"}));
  net.add_variable(Variable::continuous(1, "Z", 0.0, 1.0));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.6, 0.4}}};
  net.add_cpd(a);
  Cpd z;
  z.child = 1;
  z.parents = {0};
  z.body = ClgCpd{{ClgBlock{0.3, {}, 0.01}, ClgBlock{0.7, {}, 0.01}}};
  net.add_cpd(z);

  HybridNetwork dnet = discretize_network(net, 20);
  CHECK(dnet.var(0).cardinality == 2);
  CHECK(dnet.var(0).state_names == std::vector<std::string>{"x", "y"});
  CHECK(std::get<TableCpd>(dnet.cpds[0].body).rows ==
        std::get<TableCpd>(dnet.cpds[0].body).rows);
  CHECK(dnet.cpds[1].parents == std::vector<int>{0});
  CHECK(std::get<TableCpd>(dnet.cpds[1].body).rows.size() == 2);
}

TEST_CASE("discretized scenario networks validate and stay normalized") {
  for (const HybridNetwork& net : {thermostat_network(), traffic_network()}) {
    HybridNetwork dnet = discretize_network(net, 25);
    ValidationReport rep = validate_network(dnet);
    CHECK(rep.ok());
    for (const Cpd& cpd : dnet.cpds) {
      const auto* table = std::get_if<TableCpd>(&cpd.body);
      REQUIRE(table != nullptr);
      for (const auto& row : table->rows) {
        double total = 0.0;
        for (double p : row) {
          CHECK(p >= 0.0);
          total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("evidence maps onto bin indices") {
  HybridNetwork net;
  net.add_variable(Variable::discrete(0, "A", {"0", "1"}));
  net.add_variable(Variable::continuous(1, "X", 0.0, 10.0));
  Cpd a;
  a.child = 0;
  a.body = TableCpd{{{0.5, 0.5}}};
  net.add_cpd(a);
  Cpd x;
  x.child = 1;
  x.body = UniformCpd{};
  net.add_cpd(x);

  Evidence ev;
  ev.values[0] = 1.0;
  ev.values[1] = 7.3;
  Evidence dev = discretize_evidence(net, ev, 10);
  CHECK(dev.values.at(0) == 1.0);  // discrete evidence unchanged
  CHECK(dev.values.at(1) == 7.0);  // bin 7 of 10
}

TEST_CASE("fine discretization approaches the analytic posterior") {
  // X ~ N(0,1) on [-6,6], Y | X ~ N(X, 1); observing Y = 1 gives
  // X | Y=1 ~ N(0.5, 0.5) analytically.
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "X", -6.0, 6.0));
  net.add_variable(Variable::continuous(1, "Y", -8.0, 8.0));
  Cpd x;
  x.child = 0;
  x.body = ClgCpd{{ClgBlock{0.0, {}, 1.0}}};
  net.add_cpd(x);
  Cpd y;
  y.child = 1;
  y.parents = {0};
  y.body = ClgCpd{{ClgBlock{0.0, {1.0}, 1.0}}};
  net.add_cpd(y);

  const int bins = 200;
  HybridNetwork dnet = discretize_network(net, bins);
  Evidence ev;
  ev.values[1] = 1.0;
  Evidence dev = discretize_evidence(net, ev, bins);
  ExactResult res = exact_propagate(dnet, dev);
  auto pmf = exact_marginal(res, 0);

  double mean = 0.0;
  for (int b = 0; b < bins; ++b) mean += pmf[b] * bin_midpoint(-6.0, 6.0, bins, b);
  double var = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double d = bin_midpoint(-6.0, 6.0, bins, b) - mean;
    var += pmf[b] * d * d;
  }
  CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
  CHECK(var == doctest::Approx(0.5).epsilon(0.02));
}

}  // TEST_SUITE
