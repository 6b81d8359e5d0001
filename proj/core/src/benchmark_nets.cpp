#include "hybridbn/benchmark_nets.hpp"

#include <algorithm>
#include <stdexcept>

namespace hbn {

namespace {

Cpd table(int child, std::vector<int> parents, std::vector<std::vector<double>> rows) {
  Cpd c;
  c.child = child;
  c.parents = std::move(parents);
  c.body = TableCpd{std::move(rows)};
  return c;
}

Cpd clg(int child, std::vector<int> parents, std::vector<ClgBlock> blocks) {
  Cpd c;
  c.child = child;
  c.parents = std::move(parents);
  c.body = ClgCpd{std::move(blocks)};
  return c;
}

Cpd softmax(int child, std::vector<int> parents, std::vector<SoftmaxBlock> blocks) {
  Cpd c;
  c.child = child;
  c.parents = std::move(parents);
  c.body = SoftmaxCpd{std::move(blocks)};
  return c;
}

Cpd uniform(int child) {
  Cpd c;
  c.child = child;
  c.body = UniformCpd{};
  return c;
}

// Three-way thermostat reading of an inside temperature x: scores are
// 1.5*(16 - x) for "low", 0 for "medium", 1.5*(x - 22) for "high", so each
// region dominates its own temperature band.
SoftmaxBlock reading_block() {
  return SoftmaxBlock{{
      {{24.0, -1.5}, {0.96, 0.03, 0.01}},
      {{0.0, 0.0}, {0.03, 0.94, 0.03}},
      {{-33.0, 1.5}, {0.01, 0.03, 0.96}},
  }};
}

const std::vector<std::vector<double>> kHeaterRows = {
    {0.05, 0.95},  // reading low -> heater almost surely on
    {0.50, 0.50},
    {0.95, 0.05},
};

}  // namespace

HybridNetwork thermostat_network() {
  HybridNetwork net;
  net.add_variable(Variable::continuous(0, "OutsideTemp0", -10.0, 40.0));
  net.add_variable(Variable::continuous(1, "InsideTemp0", 0.0, 40.0));
  net.add_variable(Variable::discrete(2, "Reading0", {"low", "medium", "high"}));
  net.add_variable(Variable::discrete(3, "Heater0", {"off", "on"}));
  net.add_variable(Variable::continuous(4, "OutsideTemp1", -10.0, 40.0));
  net.add_variable(Variable::continuous(5, "InsideTemp1", 0.0, 40.0));
  net.add_variable(Variable::discrete(6, "Reading1", {"low", "medium", "high"}));
  net.add_variable(Variable::discrete(7, "Heater1", {"off", "on"}));

  net.add_cpd(uniform(0));
  net.add_cpd(clg(1, {0}, {{12.0, {0.3}, 4.0}}));
  net.add_cpd(softmax(2, {1}, {reading_block()}));
  net.add_cpd(table(3, {2}, kHeaterRows));
  net.add_cpd(clg(4, {0}, {{0.75, {0.95}, 2.25}}));
  // Inside temperature drifts toward outside and holds its own heat; the
  // heater adds a fixed boost. Blocks are indexed by Heater0 (off, on).
  net.add_cpd(clg(5, {4, 1, 3}, {{0.0, {0.25, 0.60}, 2.25},
                                 {8.0, {0.10, 0.60}, 2.25}}));
  net.add_cpd(softmax(6, {5}, {reading_block()}));
  net.add_cpd(table(7, {6}, kHeaterRows));
  return net;
}

Scenario thermostat_easy(const HybridNetwork& net) {
  Scenario s;
  s.name = "thermostat-easy";
  s.evidence.values[*net.find_variable("Reading0")] = 1.0;  // medium
  s.evidence.values[*net.find_variable("Reading1")] = 1.0;  // medium
  s.query_vars = {*net.find_variable("OutsideTemp0")};
  return s;
}

Scenario thermostat_conflicting(const HybridNetwork& net) {
  Scenario s;
  s.name = "thermostat-conflicting";
  s.evidence.values[*net.find_variable("Reading0")] = 0.0;  // low
  s.evidence.values[*net.find_variable("Reading1")] = 2.0;  // high
  s.query_vars = {*net.find_variable("OutsideTemp0")};
  return s;
}

HybridNetwork traffic_network() {
  HybridNetwork net;
  const int slices = 3;
  for (int t = 0; t < slices; ++t) {
    const int base = 10 * t;
    const std::string suffix = std::to_string(t);
    net.add_variable(Variable::continuous(base + 0, "Xdot" + suffix, -30.0, 30.0));
    net.add_variable(Variable::discrete(base + 1, "SensorOKX" + suffix, {"ok", "broken"}));
    net.add_variable(Variable::continuous(base + 2, "XdotSensed" + suffix, -35.0, 35.0));
    net.add_variable(Variable::continuous(base + 3, "Ydot" + suffix, -30.0, 30.0));
    net.add_variable(Variable::discrete(base + 4, "SensorOKY" + suffix, {"ok", "broken"}));
    net.add_variable(Variable::continuous(base + 5, "YdotSensed" + suffix, -35.0, 35.0));
    net.add_variable(Variable::discrete(base + 6, "FwdAction" + suffix,
                                        {"cruise", "accel", "brake"}));
    net.add_variable(Variable::discrete(base + 7, "FwdActionObs" + suffix,
                                        {"cruise", "accel", "brake"}));
    net.add_variable(Variable::discrete(base + 8, "Nearby" + suffix, {"no", "yes"}));
    net.add_variable(Variable::discrete(base + 9, "NearbyObs" + suffix, {"no", "yes"}));
  }

  // A working sensor tracks the velocity closely; a broken one returns
  // noise spread over the whole measurable range.
  const std::vector<ClgBlock> sensor_blocks = {{0.0, {1.0}, 1.0},
                                               {0.0, {0.0}, 3600.0}};
  const std::vector<std::vector<double>> sensor_ok_prior = {{0.9999, 0.0001}};
  const std::vector<std::vector<double>> action_obs_rows = {
      {0.90, 0.05, 0.05}, {0.05, 0.90, 0.05}, {0.05, 0.05, 0.90}};
  const std::vector<std::vector<double>> action_chain_rows = {
      {0.80, 0.10, 0.10}, {0.10, 0.80, 0.10}, {0.10, 0.10, 0.80}};
  const std::vector<std::vector<double>> nearby_obs_rows = {{0.93, 0.07}, {0.07, 0.93}};
  const std::vector<std::vector<double>> nearby_chain_rows = {{0.85, 0.15}, {0.15, 0.85}};

  for (int t = 0; t < slices; ++t) {
    const int base = 10 * t;
    if (t == 0) {
      net.add_cpd(clg(base + 0, {}, {{0.0, {}, 64.0}}));
    } else {
      net.add_cpd(clg(base + 0, {base - 10}, {{0.0, {0.9}, 4.0}}));
    }
    net.add_cpd(table(base + 1, {}, sensor_ok_prior));
    net.add_cpd(clg(base + 2, {base + 0, base + 1}, sensor_blocks));
    if (t == 0) {
      net.add_cpd(clg(base + 3, {}, {{0.0, {}, 64.0}}));
    } else {
      net.add_cpd(clg(base + 3, {base - 7}, {{0.0, {0.9}, 4.0}}));
    }
    net.add_cpd(table(base + 4, {}, sensor_ok_prior));
    net.add_cpd(clg(base + 5, {base + 3, base + 4}, sensor_blocks));
    if (t == 0) {
      net.add_cpd(table(base + 6, {}, {{0.70, 0.15, 0.15}}));
    } else {
      net.add_cpd(table(base + 6, {base - 4}, action_chain_rows));
    }
    net.add_cpd(table(base + 7, {base + 6}, action_obs_rows));
    if (t == 0) {
      net.add_cpd(table(base + 8, {}, {{0.80, 0.20}}));
    } else {
      net.add_cpd(table(base + 8, {base - 2}, nearby_chain_rows));
    }
    net.add_cpd(table(base + 9, {base + 8}, nearby_obs_rows));
  }
  return net;
}

namespace {

Scenario traffic_scenario(const HybridNetwork& net, const std::string& name,
                          std::vector<double> xdot_sensed,
                          std::vector<double> ydot_sensed = {-1.0, -0.5, 0.0}) {
  Scenario s;
  s.name = name;
  for (int t = 0; t < 3; ++t) {
    const std::string suffix = std::to_string(t);
    s.evidence.values[*net.find_variable("XdotSensed" + suffix)] = xdot_sensed[t];
    s.evidence.values[*net.find_variable("YdotSensed" + suffix)] = ydot_sensed[t];
    s.evidence.values[*net.find_variable("FwdActionObs" + suffix)] = 0.0;  // cruise
    s.evidence.values[*net.find_variable("NearbyObs" + suffix)] = 0.0;    // no
  }
  s.query_vars = {*net.find_variable("Xdot2"), *net.find_variable("Ydot2"),
                  *net.find_variable("FwdAction2"), *net.find_variable("Nearby2")};
  return s;
}

}  // namespace

Scenario traffic_easy(const HybridNetwork& net) {
  return traffic_scenario(net, "traffic-easy", {3.0, 2.5, 3.5});
}

Scenario traffic_drift(const HybridNetwork& net) {
  // Readings climb about one transition-noise sigma per slice against the
  // 0.9 decay. No single value is surprising, but a forward sample must track
  // the climb on both axes at sensor precision to keep any weight.
  return traffic_scenario(net, "traffic-drift", {8.0, 10.0, 12.0},
                          {-8.0, -10.0, -12.0});
}

Scenario traffic_conflicting(const HybridNetwork& net) {
  // The final reading jumps far beyond what the dynamics allow, so the
  // posterior has to conclude the sensor broke.
  Scenario s = traffic_scenario(net, "traffic-conflicting", {0.0, 0.0, 25.0});
  s.query_vars = {*net.find_variable("Xdot2"), *net.find_variable("SensorOKX2")};
  return s;
}

HybridNetwork random_discrete_network(int n, int max_parents, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("random network needs at least one variable");
  HybridNetwork net;
  for (int i = 0; i < n; ++i) {
    net.add_variable(Variable::discrete(i, "V" + std::to_string(i), {"f", "t"}));
  }
  for (int i = 0; i < n; ++i) {
    const int max_here = std::min(i, max_parents);
    const int np = max_here == 0
                       ? 0
                       : static_cast<int>(rng.index(static_cast<std::uint64_t>(max_here) + 1));
    std::vector<int> parents;
    while (static_cast<int>(parents.size()) < np) {
      const int p = static_cast<int>(rng.index(static_cast<std::uint64_t>(i)));
      if (std::find(parents.begin(), parents.end(), p) == parents.end()) {
        parents.push_back(p);
      }
    }
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(1) << parents.size());
    for (auto& row : rows) {
      // Bounded away from 0 and 1 so no evidence is impossible.
      const double p0 = 0.05 + 0.90 * rng.uniform01();
      row = {p0, 1.0 - p0};
    }
    net.add_cpd(table(i, std::move(parents), std::move(rows)));
  }
  return net;
}

Evidence random_discrete_evidence(const HybridNetwork& net, int count, RandomStream& rng) {
  Evidence ev;
  const int n = net.num_variables();
  count = std::min(count, n);
  while (static_cast<int>(ev.values.size()) < count) {
    const int v = static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));
    if (ev.values.count(v)) continue;
    ev.values[v] =
        static_cast<double>(rng.index(static_cast<std::uint64_t>(net.var(v).cardinality)));
  }
  return ev;
}

}  // namespace hbn
