#pragma once

#include <vector>

#include "hybridbn/clique_tree.hpp"
#include "hybridbn/table_factor.hpp"

namespace hbn {

/// Result of two-pass message propagation on a fully discrete network.
struct ExactResult {
  CliqueTree tree;
  std::vector<TableFactor> clique_beliefs;   // normalized joint over each clique
  std::vector<TableFactor> sepset_beliefs;   // normalized, indexed by tree edge
  double log_evidence;                        // log of the normalizer
};

/// Exact two-pass propagation (collect to root, then distribute). Only valid
/// for fully discrete networks; throws std::invalid_argument otherwise and
/// DegeneracyError when evidence has zero probability.
ExactResult exact_propagate(const HybridNetwork& net, const Evidence& ev,
                            int root = 0);

/// Posterior marginal of a single variable from a propagated result.
std::vector<double> exact_marginal(const ExactResult& res, int var);

/// Calibration check: for every edge, the two adjacent clique beliefs must
/// agree on the sepset. Returns the maximum absolute disagreement.
double max_calibration_error(const ExactResult& res);

}  // namespace hbn
