#pragma once

#include <span>
#include <string>
#include <vector>

#include "hybridbn/gmm.hpp"
#include "hybridbn/network.hpp"
#include "hybridbn/weighted_samples.hpp"

namespace hbn {

/// One node of a density tree. Interior nodes split on a discrete variable;
/// mixture nodes (produced when a split variable is marginalized away) keep
/// their branch weights but bind no variable; leaves hold independent
/// per-variable multinomials plus one diagonal-covariance Gaussian mixture
/// over all remaining continuous variables.
struct DtNode {
  static constexpr int kLeaf = -1;
  static constexpr int kMixture = -2;

  int split_var = kLeaf;           // >=0: variable id this node splits on
  std::vector<double> edge_probs;  // branch probabilities, sum 1
  std::vector<int> children;       // node indices, parallel to edge_probs

  std::vector<int> leaf_disc;              // sorted ids not bound on the path
  std::vector<std::vector<double>> pmfs;   // parallel to leaf_disc
  std::vector<int> leaf_cont;              // sorted continuous ids
  DiagonalGmm gmm;                         // over leaf_cont, dims may be 0

  bool is_leaf() const { return split_var == kLeaf; }
  bool is_mixture() const { return split_var == kMixture; }
};

/// Piecewise density over a sorted variable scope. Normalized: integrates
/// (sums) to 1 over the scope domain. An empty scope is the constant 1.
struct DensityTree {
  std::vector<int> scope;  // strictly ascending variable ids
  std::vector<int> cards;  // cardinality per scope var, 0 for continuous
  std::vector<DtNode> nodes;
  int root = 0;

  bool empty_scope() const { return scope.empty(); }
  int scope_pos(int var) const;  // -1 if absent

  /// Density (discrete coordinates are state indices as integral doubles).
  double eval(std::span<const double> x) const;

  /// Draws one point over the scope into `out` (scope order).
  void sample(RandomStream& rng, std::span<double> out) const;

  int num_leaves() const;
  int depth() const;
  std::string to_string(const HybridNetwork& net) const;
};

struct DtConfig {
  int min_leaf_samples = 25;
  int components = 10;        // Gaussians per leaf
  double lambda = 10.0;       // EM variance regularizer
  double pseudocount = 1.0;   // leaf multinomial smoothing
  int em_max_iterations = 100;
  double em_tolerance = 1e-6;
  uint64_t seed = 0;          // per-leaf EM seeding is derived from this
};

/// Constant-1 tree over an empty scope.
DensityTree dt_unit();

/// Fits a density tree to weighted samples. Split choice minimizes the
/// variance of the *unweighted* branch counts (ties: lowest variable id);
/// a node becomes a leaf when it holds fewer than `min_leaf_samples` rows,
/// when no discrete variable remains, or when the best split would leave a
/// branch empty. Branch probabilities are weighted fractions floored at 1e-9
/// and renormalized. Deterministic given the config seed.
DensityTree dt_learn(const WeightedSampleSet& samples, const HybridNetwork& net,
                     const DtConfig& cfg);

/// Integrates out every scope variable not in `keep_vars`.
DensityTree dt_marginalize(const DensityTree& t, std::span<const int> keep_vars);

struct DtConditionResult {
  DensityTree tree;      // normalized, evidence vars removed from scope
  double retained_mass;  // density/probability mass of the evidence slice
};

/// Conditions on the evidence entries that intersect the scope. The identity
/// retained_mass * result.eval(x) == t.eval(x joined with evidence) holds.
DtConditionResult dt_condition(const DensityTree& t, const Evidence& ev);

/// Exact marginal pmf of one discrete scope variable.
std::vector<double> dt_discrete_marginal(const DensityTree& t, int var);

/// Mass per equal-width bin for one continuous scope variable, computed from
/// leaf Gaussian cdfs; tail mass outside [lower, upper] is folded into the
/// boundary bins and the result is normalized.
std::vector<double> dt_continuous_histogram(const DensityTree& t, int var,
                                            double lower, double upper,
                                            int bins);

}  // namespace hbn
