#include "hybridbn/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hybridbn/assignment.hpp"
#include "hybridbn/cpd.hpp"
#include "hybridbn/csv.hpp"

namespace hbn {

double bin_midpoint(double lower, double upper, int bins, int b) {
  return lower + (upper - lower) * (b + 0.5) / bins;
}

int bin_index(double lower, double upper, int bins, double x) {
  const int b = static_cast<int>(std::floor((x - lower) / (upper - lower) * bins));
  return std::min(std::max(b, 0), bins - 1);
}

namespace {

// Midpoint-labelled discrete stand-in for a continuous variable.
Variable binned_variable(const Variable& v, int bins) {
  std::vector<std::string> states(bins);
  for (int b = 0; b < bins; ++b) {
    states[b] = format_number(bin_midpoint(v.lower, v.upper, bins, b));
  }
  return Variable::discrete(v.id, v.name, std::move(states));
}

// Gaussian mass per bin; both tails fold into the boundary bins.
std::vector<double> gaussian_bin_row(const Variable& v, int bins, double mean,
                                     double variance) {
  std::vector<double> row(bins);
  const double width = (v.upper - v.lower) / bins;
  double prev = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double cur =
        b + 1 == bins ? 1.0 : gaussian_cdf(v.lower + width * (b + 1), mean, variance);
    row[b] = cur - prev;
    prev = cur;
  }
  return row;
}

}  // namespace

HybridNetwork discretize_network(const HybridNetwork& net, int bins) {
  if (bins < 2) throw std::invalid_argument("discretize: need at least two bins");
  HybridNetwork out;
  for (const auto& v : net.variables) {
    out.add_variable(v.is_continuous() ? binned_variable(v, bins) : v);
  }

  for (const auto& cpd : net.cpds) {
    const Variable& child = net.var(cpd.child);
    Cpd ncpd;
    ncpd.child = cpd.child;
    ncpd.parents = cpd.parents;

    // Joint enumeration over the discretized parents, declaration order,
    // last parent fastest — the row order of the new table.
    std::vector<int> pcards(cpd.parents.size());
    for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
      pcards[i] = out.var(cpd.parents[i]).cardinality;
    }
    auto parent_values_at = [&](std::span<const int> assign, std::vector<double>& vals) {
      vals.resize(cpd.parents.size());
      for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
        const Variable& p = net.var(cpd.parents[i]);
        vals[i] = p.is_continuous()
                      ? bin_midpoint(p.lower, p.upper, bins, assign[i])
                      : static_cast<double>(assign[i]);
      }
    };

    switch (cpd.kind()) {
      case CpdKind::Table:
        ncpd.body = std::get<TableCpd>(cpd.body);
        break;
      case CpdKind::Uniform: {
        TableCpd t;
        t.rows.push_back(std::vector<double>(bins, 1.0 / bins));
        ncpd.body = std::move(t);
        break;
      }
      case CpdKind::Clg: {
        const auto& g = std::get<ClgCpd>(cpd.body);
        TableCpd t;
        t.rows.resize(joint_size(pcards));
        std::vector<int> assign(pcards.size(), 0);
        std::vector<double> vals;
        std::size_t row = 0;
        do {
          parent_values_at(assign, vals);
          const ClgBlock& b = g.blocks[cpd.discrete_block_index(net, vals)];
          double mean = b.intercept;
          std::size_t k = 0;
          for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
            if (net.var(cpd.parents[i]).is_continuous()) mean += b.weights[k++] * vals[i];
          }
          t.rows[row++] = gaussian_bin_row(child, bins, mean, b.variance);
        } while (!pcards.empty() && joint_next(pcards, assign));
        ncpd.body = std::move(t);
        break;
      }
      case CpdKind::Softmax: {
        const auto& s = std::get<SoftmaxCpd>(cpd.body);
        TableCpd t;
        t.rows.resize(joint_size(pcards));
        std::vector<int> assign(pcards.size(), 0);
        std::vector<double> vals, z;
        std::size_t row = 0;
        do {
          parent_values_at(assign, vals);
          const SoftmaxBlock& b = s.blocks[cpd.discrete_block_index(net, vals)];
          z.clear();
          for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
            if (net.var(cpd.parents[i]).is_continuous()) z.push_back(vals[i]);
          }
          const auto w = Cpd::softmax_weights(b, z);
          std::vector<double> p(child.cardinality, 0.0);
          for (std::size_t r = 0; r < w.size(); ++r) {
            for (int j = 0; j < child.cardinality; ++j) p[j] += w[r] * b.regions[r].p[j];
          }
          t.rows[row++] = std::move(p);
        } while (!pcards.empty() && joint_next(pcards, assign));
        ncpd.body = std::move(t);
        break;
      }
    }
    out.add_cpd(std::move(ncpd));
  }
  return out;
}

Evidence discretize_evidence(const HybridNetwork& net, const Evidence& ev, int bins) {
  Evidence out;
  for (const auto& [id, value] : ev.values) {
    const Variable& v = net.var(id);
    out.values[id] = v.is_continuous()
                         ? static_cast<double>(bin_index(v.lower, v.upper, bins, value))
                         : value;
  }
  return out;
}

}  // namespace hbn
