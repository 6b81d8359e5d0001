#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridbn/cpd.hpp"
#include "hybridbn/variable.hpp"

namespace hbn {

// Observed values keyed by variable id. Discrete observations are state
// indices stored as integral doubles; continuous ones are reals in range.
struct Evidence {
  std::map<int, double> values;

  bool empty() const { return values.empty(); }
  bool contains(int var) const { return values.count(var) != 0; }
  double at(int var) const { return values.at(var); }
};

struct Violation {
  std::string where;  // variable or CPD name
  std::string rule;   // short rule id, e.g. "row sum != 1"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// A hybrid Bayesian network: variables indexed by id, one CPD per variable.
/// Immutable once built; all inference code treats it as read-only.
class HybridNetwork {
 public:
  std::vector<Variable> variables;
  std::vector<Cpd> cpds;  // cpds[i].child == i

  int num_variables() const { return static_cast<int>(variables.size()); }
  const Variable& var(int id) const { return variables.at(static_cast<std::size_t>(id)); }
  const Cpd& cpd_of(int id) const { return cpds.at(static_cast<std::size_t>(id)); }

  std::optional<int> find_variable(const std::string& name) const;

  // Parents-before-children order; ties broken by variable id.
  // Throws std::logic_error if the graph has a cycle.
  std::vector<int> topological_order() const;

  bool is_acyclic() const;

  // True if every variable is discrete.
  bool fully_discrete() const;

  // True if `value` lies in the domain of variable `id` (state index range
  // for discrete, [lower, upper] for continuous).
  bool value_in_domain(int id, double value) const;

  void add_variable(Variable v);
  void add_cpd(Cpd c);
};

/// Checks every structural and numeric invariant of the network; violations
/// are returned as data, never thrown.
ValidationReport validate_network(const HybridNetwork& net);

/// Checks that evidence values refer to known variables and are in-domain.
ValidationReport validate_evidence(const HybridNetwork& net, const Evidence& ev);

}  // namespace hbn
