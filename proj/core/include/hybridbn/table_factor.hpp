#pragma once

#include <span>
#include <vector>

#include "hybridbn/network.hpp"

namespace hbn {

/// Dense factor over a sorted set of discrete variables. Values are stored
/// in row-major (C) order over the scope: the *last* scope variable cycles
/// fastest.
class TableFactor {
 public:
  std::vector<int> scope;        // strictly ascending variable ids
  std::vector<int> cards;        // cardinalities, parallel to scope
  std::vector<double> values;    // size == product(cards), or 1 for empty scope

  TableFactor() : values(1, 1.0) {}
  TableFactor(std::vector<int> scope_vars, const HybridNetwork& net);
  TableFactor(std::vector<int> scope_vars, std::vector<int> cardinalities);

  std::size_t size() const { return values.size(); }
  bool has_var(int id) const;
  int scope_pos(int id) const;  // -1 if absent

  double at(std::span<const int> assignment) const;  // full-scope assignment
  double& at(std::span<const int> assignment);

  /// Pointwise product; result scope is the sorted union of both scopes.
  TableFactor product(const TableFactor& other) const;

  /// Sums out `drop_vars`; result keeps remaining scope order.
  TableFactor marginalize(std::span<const int> drop_vars) const;

  /// Keeps only entries consistent with the (discrete) evidence restricted to
  /// this factor's scope, zeroing the rest. Scope is unchanged.
  TableFactor reduce(const Evidence& ev) const;

  /// Broadcasts this factor onto a superset scope.
  TableFactor extend_to(const std::vector<int>& super_scope,
                        const std::vector<int>& super_cards) const;

  /// Divides by total mass. Throws DegeneracyError if the total is zero.
  void normalize();

  double total() const;
};

/// Full joint by brute-force enumeration of every CPD product. Refuses
/// networks over ~2^20 joint states.
TableFactor brute_force_joint(const HybridNetwork& net);

/// Brute-force posterior marginal of one variable given evidence.
std::vector<double> brute_force_marginal(const HybridNetwork& net, int var,
                                         const Evidence& ev);

}  // namespace hbn
