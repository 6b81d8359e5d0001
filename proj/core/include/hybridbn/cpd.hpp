#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hybridbn/rng.hpp"

namespace hbn {

class HybridNetwork;

// Conditional probability table. All parents and the child are discrete.
// rows[j] is the distribution over child states for the j-th joint parent
// assignment (parents in declaration order, last parent varying fastest).
struct TableCpd {
  std::vector<std::vector<double>> rows;
};

// One linear-Gaussian block: child mean = intercept + weights . continuous
// parent values, with fixed variance.
struct ClgBlock {
  double intercept = 0.0;
  std::vector<double> weights;  // one per continuous parent, in parent order
  double variance = 1.0;
};

// Conditional linear Gaussian. Child is continuous; one block per joint
// assignment of the discrete parents (same flattening as TableCpd rows).
struct ClgCpd {
  std::vector<ClgBlock> blocks;
};

// One softmax region: linear score alpha[0] + alpha[1..m] . z over the
// continuous parents, and a distribution p over the child states.
struct SoftmaxRegion {
  std::vector<double> alpha;
  std::vector<double> p;
};

// Generalized softmax for a discrete child with continuous (and optionally
// discrete) parents: P(c_j | z) = sum_r w_r p[r][j] with w the softmax of the
// region scores. One region set per joint discrete-parent assignment.
struct SoftmaxBlock {
  std::vector<SoftmaxRegion> regions;
};

struct SoftmaxCpd {
  std::vector<SoftmaxBlock> blocks;
};

// Uniform density over the child's [lower, upper]; no parents.
struct UniformCpd {};

enum class CpdKind { Table, Clg, Softmax, Uniform };

struct Cpd {
  int child = -1;
  std::vector<int> parents;
  std::variant<TableCpd, ClgCpd, SoftmaxCpd, UniformCpd> body;

  CpdKind kind() const { return static_cast<CpdKind>(body.index()); }

  /// Probability (discrete child) or density (continuous child) of
  /// `child_value` given `parent_values` (aligned with `parents`).
  /// Throws std::domain_error when a value is outside its variable's domain.
  double eval(const HybridNetwork& net, double child_value,
              std::span<const double> parent_values) const;

  /// Draws a child value from the conditional distribution. Continuous
  /// draws that land outside the child's range are clamped to the boundary;
  /// each clamp increments *clamp_counter when given.
  double sample(const HybridNetwork& net, std::span<const double> parent_values,
                RandomStream& rng, std::uint64_t* clamp_counter = nullptr) const;

  // Softmax region weights at the given continuous parent values
  // (max-subtracted before exponentiation).
  static std::vector<double> softmax_weights(const SoftmaxBlock& block,
                                             std::span<const double> z);

  // Index of the block selected by the discrete parents within
  // `parent_values`; 0 when there are none.
  std::size_t discrete_block_index(const HybridNetwork& net,
                                   std::span<const double> parent_values) const;
};

double gaussian_pdf(double x, double mean, double variance);
double gaussian_cdf(double x, double mean, double variance);

}  // namespace hbn
