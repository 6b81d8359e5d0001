#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hbn {

// Joint-assignment indexing over an ordered list of cardinalities.
// The last position varies fastest (row-major).

inline std::size_t joint_size(std::span<const int> cards) {
  std::size_t n = 1;
  for (int c : cards) {
    if (c <= 0) throw std::logic_error("joint_size: nonpositive cardinality");
    n *= static_cast<std::size_t>(c);
  }
  return n;
}

inline std::size_t joint_index(std::span<const int> cards, std::span<const int> values) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(values[i]);
  }
  return idx;
}

inline void joint_unflatten(std::size_t idx, std::span<const int> cards, std::span<int> out) {
  for (std::size_t i = cards.size(); i-- > 0;) {
    out[i] = static_cast<int>(idx % static_cast<std::size_t>(cards[i]));
    idx /= static_cast<std::size_t>(cards[i]);
  }
}

// Advances `values` to the next joint assignment; returns false after the last.
inline bool joint_next(std::span<const int> cards, std::span<int> values) {
  for (std::size_t i = cards.size(); i-- > 0;) {
    if (++values[i] < cards[i]) return true;
    values[i] = 0;
  }
  return false;
}

// Positions of the elements of `sub` inside `full`; both must be id lists and
// every element of `sub` must occur in `full`.
inline std::vector<int> index_map(std::span<const int> sub, std::span<const int> full) {
  std::vector<int> map(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    auto it = std::find(full.begin(), full.end(), sub[i]);
    if (it == full.end()) throw std::logic_error("index_map: element not in full scope");
    map[i] = static_cast<int>(it - full.begin());
  }
  return map;
}

}  // namespace hbn
