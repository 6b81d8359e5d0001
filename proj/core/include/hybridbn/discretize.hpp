#pragma once

#include "hybridbn/network.hpp"

namespace hbn {

/// Replaces every continuous variable with a `bins`-state discrete variable
/// over equal-width bins of its range (state names are the bin midpoints).
/// Gaussian CPD rows become cdf differences at the bin edges, evaluated with
/// continuous parents fixed at their bin midpoints; tail mass outside the
/// range folds into the boundary bins. Softmax CPDs evaluate their scores at
/// the parent midpoints. The result is fully discrete.
HybridNetwork discretize_network(const HybridNetwork& net, int bins = 100);

/// Maps evidence on the original network onto the discretized one:
/// continuous observations become the index of their containing bin.
Evidence discretize_evidence(const HybridNetwork& net, const Evidence& ev,
                             int bins = 100);

/// Midpoint of bin `b` for a continuous variable's range.
double bin_midpoint(double lower, double upper, int bins, int b);

/// Index of the bin containing `x`, clamped to [0, bins-1].
int bin_index(double lower, double upper, int bins, double x);

}  // namespace hbn
