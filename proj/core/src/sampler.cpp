#include "hybridbn/sampler.hpp"

#include <numeric>
#include <stdexcept>

#include "hybridbn/discretize.hpp"
#include "hybridbn/errors.hpp"

namespace hbn {

namespace {

void forward_pass(const HybridNetwork& net, const Evidence* ev, std::size_t n,
                  RandomStream& rng, WeightedSampleSet& out) {
  const int nv = net.num_variables();
  out.scope.resize(nv);
  std::iota(out.scope.begin(), out.scope.end(), 0);
  out.values.resize(n * static_cast<std::size_t>(nv));
  out.weights.assign(n, 1.0);

  const auto order = net.topological_order();
  std::vector<double> parent_values;
  for (std::size_t r = 0; r < n; ++r) {
    double* row = out.values.data() + r * nv;
    double w = 1.0;
    for (int v : order) {
      const Cpd& cpd = net.cpd_of(v);
      parent_values.resize(cpd.parents.size());
      for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
        parent_values[i] = row[cpd.parents[i]];
      }
      if (ev && ev->contains(v)) {
        row[v] = ev->at(v);
        w *= cpd.eval(net, row[v], parent_values);
      } else {
        row[v] = cpd.sample(net, parent_values, rng, &out.diag.clamped);
      }
    }
    out.weights[r] = w;
  }
  if (ev) {
    out.diag.all_zero = !(out.total_weight() > 0.0);
  }
}

}  // namespace

WeightedSampleSet prior_sample(const HybridNetwork& net, std::size_t n,
                               RandomStream& rng) {
  WeightedSampleSet out;
  forward_pass(net, nullptr, n, rng, out);
  return out;
}

WeightedSampleSet likelihood_weighting(const HybridNetwork& net, const Evidence& ev,
                                       std::size_t n, RandomStream& rng) {
  auto rep = validate_evidence(net, ev);
  if (!rep.ok()) throw std::invalid_argument("bad evidence: " + rep.to_string());
  WeightedSampleSet out;
  forward_pass(net, &ev, n, rng, out);
  return out;
}

std::vector<double> weighted_discrete_marginal(const WeightedSampleSet& s, int var,
                                               int cardinality) {
  const int pos = s.scope_pos(var);
  if (pos < 0) throw std::invalid_argument("marginal: variable not in sample scope");
  std::vector<double> pmf(cardinality, 0.0);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    pmf[static_cast<int>(s.values[r * s.scope.size() + pos])] += s.weights[r];
  }
  double total = 0.0;
  for (double p : pmf) total += p;
  if (!(total > 0.0)) throw DegeneracyError("all sample weights are zero");
  for (double& p : pmf) p /= total;
  return pmf;
}

std::vector<double> weighted_continuous_histogram(const WeightedSampleSet& s, int var,
                                                  double lower, double upper, int bins) {
  const int pos = s.scope_pos(var);
  if (pos < 0) throw std::invalid_argument("histogram: variable not in sample scope");
  std::vector<double> hist(bins, 0.0);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    hist[bin_index(lower, upper, bins, s.values[r * s.scope.size() + pos])] +=
        s.weights[r];
  }
  double total = 0.0;
  for (double h : hist) total += h;
  if (!(total > 0.0)) throw DegeneracyError("all sample weights are zero");
  for (double& h : hist) h /= total;
  return hist;
}

}  // namespace hbn
