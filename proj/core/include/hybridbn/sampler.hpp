#pragma once

#include "hybridbn/network.hpp"
#include "hybridbn/rng.hpp"
#include "hybridbn/weighted_samples.hpp"

namespace hbn {

/// Forward (ancestral) sampling; unit weights, scope = all variables.
WeightedSampleSet prior_sample(const HybridNetwork& net, std::size_t n,
                               RandomStream& rng);

/// Likelihood weighting: evidence variables are fixed to their observed
/// values, every other variable is sampled forward, and each row is weighted
/// by the product of the evidence CPD densities. Scope = all variables.
WeightedSampleSet likelihood_weighting(const HybridNetwork& net,
                                       const Evidence& ev, std::size_t n,
                                       RandomStream& rng);

/// Weighted pmf estimate for a discrete variable.
std::vector<double> weighted_discrete_marginal(const WeightedSampleSet& s,
                                               int var, int cardinality);

/// Weighted histogram over `bins` equal-width bins of [lower, upper];
/// out-of-range rows land in the boundary bins. Normalized.
std::vector<double> weighted_continuous_histogram(const WeightedSampleSet& s,
                                                  int var, double lower,
                                                  double upper, int bins);

}  // namespace hbn
