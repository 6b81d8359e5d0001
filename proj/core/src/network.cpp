#include "hybridbn/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hybridbn/assignment.hpp"

namespace hbn {

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.where << ": " << v.rule;
    if (!v.detail.empty()) os << " (" << v.detail << ")";
    os << '\n';
  }
  return os.str();
}

std::optional<int> HybridNetwork::find_variable(const std::string& name) const {
  for (const auto& v : variables) {
    if (v.name == name) return v.id;
  }
  return std::nullopt;
}

std::vector<int> HybridNetwork::topological_order() const {
  const int n = num_variables();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> children(n);
  for (const auto& c : cpds) {
    for (int p : c.parents) {
      children[p].push_back(c.child);
      ++indeg[c.child];
    }
  }
  std::set<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.insert(i);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int c : children[v]) {
      if (--indeg[c] == 0) ready.insert(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::logic_error("topological_order: the network has a cycle");
  }
  return order;
}

bool HybridNetwork::is_acyclic() const {
  try {
    topological_order();
    return true;
  } catch (const std::logic_error&) {
    return false;
  }
}

bool HybridNetwork::fully_discrete() const {
  return std::all_of(variables.begin(), variables.end(),
                     [](const Variable& v) { return v.is_discrete(); });
}

bool HybridNetwork::value_in_domain(int id, double value) const {
  if (id < 0 || id >= num_variables()) return false;
  const Variable& v = var(id);
  if (!std::isfinite(value)) return false;
  if (v.is_discrete()) {
    return value == std::floor(value) && value >= 0.0 &&
           value < static_cast<double>(v.cardinality);
  }
  return value >= v.lower && value <= v.upper;
}

void HybridNetwork::add_variable(Variable v) {
  if (v.id != num_variables()) {
    throw std::logic_error("add_variable: ids must be added in order");
  }
  variables.push_back(std::move(v));
}

void HybridNetwork::add_cpd(Cpd c) {
  if (c.child != static_cast<int>(cpds.size())) {
    throw std::logic_error("add_cpd: cpds must be added in child-id order");
  }
  cpds.push_back(std::move(c));
}

namespace {

constexpr double kRowSumTolerance = 1e-9;

void check_distribution(std::vector<Violation>& out, const std::string& where,
                        const std::vector<double>& p, std::size_t expected_size,
                        const std::string& what) {
  if (p.size() != expected_size) {
    out.push_back({where, what + " has wrong length",
                   std::to_string(p.size()) + " vs " + std::to_string(expected_size)});
    return;
  }
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      out.push_back({where, what + " has a negative or non-finite entry", ""});
      return;
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kRowSumTolerance) {
    out.push_back({where, what + " does not sum to 1",
                   "sum = " + std::to_string(total)});
  }
}

std::size_t discrete_parent_joint_size(const HybridNetwork& net, const Cpd& c) {
  std::size_t n = 1;
  for (int p : c.parents) {
    if (net.var(p).is_discrete()) n *= static_cast<std::size_t>(net.var(p).cardinality);
  }
  return n;
}

std::size_t continuous_parent_count(const HybridNetwork& net, const Cpd& c) {
  std::size_t n = 0;
  for (int p : c.parents) {
    if (net.var(p).is_continuous()) ++n;
  }
  return n;
}

void validate_cpd(std::vector<Violation>& out, const HybridNetwork& net, const Cpd& c) {
  const Variable& child = net.var(c.child);
  const std::string where = "cpd of '" + child.name + "'";

  std::set<int> seen;
  for (int p : c.parents) {
    if (p < 0 || p >= net.num_variables()) {
      out.push_back({where, "unknown parent id", std::to_string(p)});
      return;
    }
    if (p == c.child) {
      out.push_back({where, "variable is its own parent", ""});
      return;
    }
    if (!seen.insert(p).second) {
      out.push_back({where, "duplicate parent", net.var(p).name});
      return;
    }
  }

  const std::size_t blocks = discrete_parent_joint_size(net, c);
  const std::size_t zdim = continuous_parent_count(net, c);

  switch (c.kind()) {
    case CpdKind::Table: {
      if (!child.is_discrete()) {
        out.push_back({where, "table cpd requires a discrete child", ""});
        return;
      }
      if (zdim != 0) {
        out.push_back({where, "table cpd requires discrete parents only", ""});
        return;
      }
      const auto& t = std::get<TableCpd>(c.body);
      if (t.rows.size() != blocks) {
        out.push_back({where, "wrong number of rows",
                       std::to_string(t.rows.size()) + " vs " + std::to_string(blocks)});
        return;
      }
      for (std::size_t j = 0; j < t.rows.size(); ++j) {
        check_distribution(out, where, t.rows[j],
                           static_cast<std::size_t>(child.cardinality),
                           "row " + std::to_string(j));
      }
      break;
    }
    case CpdKind::Clg: {
      if (!child.is_continuous()) {
        out.push_back({where, "linear-gaussian cpd requires a continuous child", ""});
        return;
      }
      const auto& g = std::get<ClgCpd>(c.body);
      if (g.blocks.size() != blocks) {
        out.push_back({where, "wrong number of blocks",
                       std::to_string(g.blocks.size()) + " vs " + std::to_string(blocks)});
        return;
      }
      for (std::size_t j = 0; j < g.blocks.size(); ++j) {
        const ClgBlock& b = g.blocks[j];
        const std::string bw = where + " block " + std::to_string(j);
        if (b.weights.size() != zdim) {
          out.push_back({bw, "wrong weight count",
                         std::to_string(b.weights.size()) + " vs " + std::to_string(zdim)});
        }
        if (!(b.variance > 0.0) || !std::isfinite(b.variance)) {
          out.push_back({bw, "variance must be positive and finite",
                         std::to_string(b.variance)});
        }
        if (!std::isfinite(b.intercept)) {
          out.push_back({bw, "intercept must be finite", ""});
        }
        for (double w : b.weights) {
          if (!std::isfinite(w)) {
            out.push_back({bw, "weights must be finite", ""});
            break;
          }
        }
      }
      break;
    }
    case CpdKind::Softmax: {
      if (!child.is_discrete()) {
        out.push_back({where, "softmax cpd requires a discrete child", ""});
        return;
      }
      const auto& s = std::get<SoftmaxCpd>(c.body);
      if (s.blocks.size() != blocks) {
        out.push_back({where, "wrong number of blocks",
                       std::to_string(s.blocks.size()) + " vs " + std::to_string(blocks)});
        return;
      }
      for (std::size_t j = 0; j < s.blocks.size(); ++j) {
        const SoftmaxBlock& b = s.blocks[j];
        const std::string bw = where + " block " + std::to_string(j);
        if (b.regions.empty()) {
          out.push_back({bw, "needs at least one region", ""});
          continue;
        }
        for (std::size_t r = 0; r < b.regions.size(); ++r) {
          const auto& reg = b.regions[r];
          if (reg.alpha.size() != zdim + 1) {
            out.push_back({bw, "region " + std::to_string(r) + " has wrong score length",
                           std::to_string(reg.alpha.size()) + " vs " + std::to_string(zdim + 1)});
          }
          for (double a : reg.alpha) {
            if (!std::isfinite(a)) {
              out.push_back({bw, "region " + std::to_string(r) + " has non-finite score", ""});
              break;
            }
          }
          check_distribution(out, bw, reg.p, static_cast<std::size_t>(child.cardinality),
                             "region " + std::to_string(r) + " distribution");
        }
      }
      break;
    }
    case CpdKind::Uniform: {
      if (!child.is_continuous()) {
        out.push_back({where, "uniform cpd requires a continuous child", ""});
      }
      if (!c.parents.empty()) {
        out.push_back({where, "uniform cpd takes no parents", ""});
      }
      break;
    }
  }
}

}  // namespace

ValidationReport validate_network(const HybridNetwork& net) {
  ValidationReport rep;
  auto& out = rep.violations;

  std::set<std::string> names;
  for (int i = 0; i < net.num_variables(); ++i) {
    const Variable& v = net.var(i);
    const std::string where = "variable '" + v.name + "'";
    if (v.id != i) {
      out.push_back({where, "id does not match its position", std::to_string(v.id)});
    }
    if (v.name.empty()) {
      out.push_back({"variable " + std::to_string(i), "empty name", ""});
    } else if (!names.insert(v.name).second) {
      out.push_back({where, "duplicate name", ""});
    }
    if (v.is_discrete()) {
      if (v.cardinality < 2) {
        out.push_back({where, "needs at least two states", std::to_string(v.cardinality)});
      }
      if (static_cast<int>(v.state_names.size()) != v.cardinality) {
        out.push_back({where, "state name count does not match cardinality", ""});
      }
      std::set<std::string> st(v.state_names.begin(), v.state_names.end());
      if (st.size() != v.state_names.size()) {
        out.push_back({where, "duplicate state names", ""});
      }
    } else {
      if (!(v.lower < v.upper) || !std::isfinite(v.lower) || !std::isfinite(v.upper)) {
        out.push_back({where, "range must be finite with lower < upper", ""});
      }
    }
  }

  if (net.cpds.size() != net.variables.size()) {
    out.push_back({"network", "every variable needs exactly one cpd",
                   std::to_string(net.cpds.size()) + " cpds for " +
                       std::to_string(net.variables.size()) + " variables"});
    return rep;
  }
  for (int i = 0; i < net.num_variables(); ++i) {
    if (net.cpds[i].child != i) {
      out.push_back({"network", "cpd order does not match variable order",
                     "position " + std::to_string(i)});
      return rep;
    }
  }

  for (const auto& c : net.cpds) validate_cpd(out, net, c);

  if (!out.empty()) return rep;  // structural errors make the cycle check unreliable
  if (!net.is_acyclic()) {
    out.push_back({"network", "the parent graph has a cycle", ""});
  }
  return rep;
}

ValidationReport validate_evidence(const HybridNetwork& net, const Evidence& ev) {
  ValidationReport rep;
  for (const auto& [id, value] : ev.values) {
    if (id < 0 || id >= net.num_variables()) {
      rep.violations.push_back({"evidence", "unknown variable id", std::to_string(id)});
      continue;
    }
    if (!net.value_in_domain(id, value)) {
      rep.violations.push_back({"evidence for '" + net.var(id).name + "'",
                                "value outside the variable's domain",
                                std::to_string(value)});
    }
  }
  return rep;
}

}  // namespace hbn
