#pragma once

#include <span>
#include <string>
#include <vector>

#include "hybridbn/rng.hpp"

namespace hbn {

/// Mixture of axis-aligned Gaussians over a fixed set of dimensions.
struct DiagonalGmm {
  int dims = 0;
  std::vector<double> weights;     // K mixture weights, sum 1
  std::vector<double> means;       // K * dims, row-major per component
  std::vector<double> variances;   // K * dims

  int components() const { return static_cast<int>(weights.size()); }
  double density(std::span<const double> x) const;
  double log_density(std::span<const double> x) const;
  void sample(RandomStream& rng, std::span<double> out) const;

  /// Marginal over a subset of dimensions (diagonal covariance makes this a
  /// coordinate drop).
  DiagonalGmm marginal(std::span<const int> keep_dims) const;
};

struct EmConfig {
  int components = 10;
  double lambda = 10.0;     // variance regularizer
  int max_iterations = 100;
  double tolerance = 1e-6;  // stop when error improves less than this
  uint64_t seed = 0;        // k-means++-style mean seeding
};

struct EmResult {
  DiagonalGmm model;
  int iterations = 0;
  std::vector<double> error_trace;  // regularized error after each iteration
  bool degenerate_warning = false;  // a component died and was re-seeded
};

/// Regularized error the EM run minimizes:
///   -sum_m w_m ln P(y_m) + lambda * sum_k sum_i 1 / (2 var_ki).
double gmm_regularized_error(const DiagonalGmm& model,
                             std::span<const double> data,
                             std::span<const double> weights, double lambda);

/// Weighted EM for a diagonal GMM with variance regularization. `data` is
/// row-major M x dims. The effective component count is capped at the number
/// of samples. Throws std::invalid_argument on empty data or all-zero weight.
EmResult fit_gmm(std::span<const double> data, int dims,
                 std::span<const double> weights, const EmConfig& cfg);

}  // namespace hbn
