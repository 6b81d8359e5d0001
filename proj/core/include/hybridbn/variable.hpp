#pragma once

#include <string>
#include <vector>

namespace hbn {

enum class VarKind { Discrete, Continuous };

/// A network variable: either discrete with k >= 2 named states or
/// continuous with a bounded range [lower, upper], lower < upper.
struct Variable {
  int id = -1;
  std::string name;
  VarKind kind = VarKind::Discrete;

  // Discrete only.
  int cardinality = 0;
  std::vector<std::string> state_names;

  // Continuous only.
  double lower = 0.0;
  double upper = 0.0;

  bool is_discrete() const { return kind == VarKind::Discrete; }
  bool is_continuous() const { return kind == VarKind::Continuous; }
  double width() const { return upper - lower; }

  static Variable discrete(int id, std::string name, std::vector<std::string> states) {
    Variable v;
    v.id = id;
    v.name = std::move(name);
    v.kind = VarKind::Discrete;
    v.cardinality = static_cast<int>(states.size());
    v.state_names = std::move(states);
    return v;
  }

  static Variable continuous(int id, std::string name, double lower, double upper) {
    Variable v;
    v.id = id;
    v.name = std::move(name);
    v.kind = VarKind::Continuous;
    v.lower = lower;
    v.upper = upper;
    return v;
  }
};

}  // namespace hbn
