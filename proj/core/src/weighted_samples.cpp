#include "hybridbn/weighted_samples.hpp"

#include <algorithm>
#include <stdexcept>

namespace hbn {

int WeightedSampleSet::scope_pos(int var) const {
  auto it = std::lower_bound(scope.begin(), scope.end(), var);
  if (it == scope.end() || *it != var) return -1;
  return static_cast<int>(it - scope.begin());
}

double WeightedSampleSet::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

double WeightedSampleSet::effective_sample_size() const {
  double s1 = 0.0, s2 = 0.0;
  for (double w : weights) {
    s1 += w;
    s2 += w * w;
  }
  if (!(s2 > 0.0)) return 0.0;
  return s1 * s1 / s2;
}

WeightedSampleSet WeightedSampleSet::project(std::span<const int> keep_vars) const {
  WeightedSampleSet out;
  out.scope.assign(keep_vars.begin(), keep_vars.end());
  out.weights = weights;
  out.diag = diag;
  std::vector<int> pos(keep_vars.size());
  for (std::size_t i = 0; i < keep_vars.size(); ++i) {
    pos[i] = scope_pos(keep_vars[i]);
    if (pos[i] < 0) throw std::logic_error("project: variable not in scope");
  }
  out.values.resize(rows() * keep_vars.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t i = 0; i < keep_vars.size(); ++i) {
      out.values[r * keep_vars.size() + i] = values[r * scope.size() + pos[i]];
    }
  }
  return out;
}

}  // namespace hbn
