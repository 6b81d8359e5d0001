#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hbn {

/// Flat row-major sample matrix over a sorted variable scope, one weight per
/// row. Discrete coordinates hold integral state indices as doubles.
struct WeightedSampleSet {
  std::vector<int> scope;      // strictly ascending variable ids
  std::vector<double> values;  // rows * scope.size()
  std::vector<double> weights; // rows

  struct Diag {
    std::uint64_t clamped = 0;   // continuous draws pushed back into range
    std::uint64_t clipped = 0;   // weights cut down by the outlier clip
    bool all_zero = false;       // every weight vanished
  } diag;

  std::size_t rows() const { return weights.size(); }
  int width() const { return static_cast<int>(scope.size()); }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * scope.size(), scope.size()};
  }
  int scope_pos(int var) const;  // -1 if absent

  double total_weight() const;
  /// Effective sample size (sum w)^2 / sum w^2; 0 for empty or all-zero sets.
  double effective_sample_size() const;

  /// Copies a subset of columns (ids must be a subset of scope).
  WeightedSampleSet project(std::span<const int> keep_vars) const;
};

}  // namespace hbn
