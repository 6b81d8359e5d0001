#pragma once

#include <string>
#include <vector>

#include "hybridbn/network.hpp"
#include "hybridbn/rng.hpp"

namespace hbn {

/// Two-slice home-heating model: outside and inside temperature (continuous)
/// drive a three-way softmax thermostat reading, which drives the heater.
HybridNetwork thermostat_network();

/// Three-slice vehicle-tracking model: x/y velocities (continuous chains)
/// observed through sensors that fail rarely, plus discrete action and
/// proximity chains with noisy observations. 30 variables, 12 of them
/// continuous, 12 observable.
HybridNetwork traffic_network();

struct Scenario {
  std::string name;
  Evidence evidence;
  std::vector<int> query_vars;
};

/// Thermostat with both readings at "medium" — evidence the prior expects.
Scenario thermostat_easy(const HybridNetwork& net);

/// Thermostat with a "low" reading followed by "high" — slices disagree.
Scenario thermostat_conflicting(const HybridNetwork& net);

/// Traffic with all 12 observations set to typical prior draws.
Scenario traffic_easy(const HybridNetwork& net);

/// Traffic with readings that rise steadily against the velocity decay on
/// both axes. Each value is individually plausible, but jointly they confine
/// the trajectory to a narrow tube, which starves forward samplers.
Scenario traffic_drift(const HybridNetwork& net);

/// Traffic with one velocity reading far outside the dynamics' reach, so the
/// posterior must blame the sensor.
Scenario traffic_conflicting(const HybridNetwork& net);

/// Random fully discrete network for cross-checking engines: `n` binary
/// variables, each with up to `max_parents` earlier parents, rows drawn from
/// a Dirichlet-like stick split. Deterministic in `rng`.
HybridNetwork random_discrete_network(int n, int max_parents, RandomStream& rng);

/// Random evidence over `count` distinct variables of a discrete network.
Evidence random_discrete_evidence(const HybridNetwork& net, int count,
                                  RandomStream& rng);

}  // namespace hbn
