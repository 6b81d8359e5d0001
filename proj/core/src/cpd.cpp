#include "hybridbn/cpd.hpp"

#include <cmath>
#include <stdexcept>

#include "hybridbn/assignment.hpp"
#include "hybridbn/network.hpp"

namespace hbn {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_in_domain(const HybridNetwork& net, int id, double value) {
  if (!net.value_in_domain(id, value)) {
    throw std::domain_error("value " + std::to_string(value) +
                            " outside the domain of variable '" +
                            net.var(id).name + "'");
  }
}

// Continuous parent values in declaration order.
std::vector<double> continuous_parent_values(const HybridNetwork& net,
                                             const Cpd& cpd,
                                             std::span<const double> parent_values) {
  std::vector<double> z;
  z.reserve(cpd.parents.size());
  for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
    if (net.var(cpd.parents[i]).is_continuous()) z.push_back(parent_values[i]);
  }
  return z;
}

}  // namespace

double gaussian_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * kPi * variance);
}

double gaussian_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

std::size_t Cpd::discrete_block_index(const HybridNetwork& net,
                                      std::span<const double> parent_values) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const Variable& p = net.var(parents[i]);
    if (!p.is_discrete()) continue;
    idx = idx * static_cast<std::size_t>(p.cardinality) +
          static_cast<std::size_t>(parent_values[i]);
  }
  return idx;
}

std::vector<double> Cpd::softmax_weights(const SoftmaxBlock& block,
                                         std::span<const double> z) {
  std::vector<double> scores(block.regions.size());
  for (std::size_t r = 0; r < block.regions.size(); ++r) {
    const auto& alpha = block.regions[r].alpha;
    double s = alpha[0];
    for (std::size_t i = 0; i < z.size(); ++i) s += alpha[i + 1] * z[i];
    scores[r] = s;
  }
  const double m = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - m);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

double Cpd::eval(const HybridNetwork& net, double child_value,
                 std::span<const double> parent_values) const {
  if (parent_values.size() != parents.size()) {
    throw std::invalid_argument("cpd eval: parent value count mismatch");
  }
  check_in_domain(net, child, child_value);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    check_in_domain(net, parents[i], parent_values[i]);
  }

  switch (kind()) {
    case CpdKind::Table: {
      const auto& t = std::get<TableCpd>(body);
      const auto& row = t.rows[discrete_block_index(net, parent_values)];
      return row[static_cast<std::size_t>(child_value)];
    }
    case CpdKind::Clg: {
      const auto& c = std::get<ClgCpd>(body);
      const ClgBlock& b = c.blocks[discrete_block_index(net, parent_values)];
      double mean = b.intercept;
      std::size_t k = 0;
      for (std::size_t i = 0; i < parents.size(); ++i) {
        if (net.var(parents[i]).is_continuous()) mean += b.weights[k++] * parent_values[i];
      }
      return gaussian_pdf(child_value, mean, b.variance);
    }
    case CpdKind::Softmax: {
      const auto& s = std::get<SoftmaxCpd>(body);
      const SoftmaxBlock& b = s.blocks[discrete_block_index(net, parent_values)];
      const auto z = continuous_parent_values(net, *this, parent_values);
      const auto w = softmax_weights(b, z);
      double p = 0.0;
      for (std::size_t r = 0; r < w.size(); ++r) {
        p += w[r] * b.regions[r].p[static_cast<std::size_t>(child_value)];
      }
      return p;
    }
    case CpdKind::Uniform:
      return 1.0 / net.var(child).width();
  }
  throw std::logic_error("cpd eval: unknown kind");
}

double Cpd::sample(const HybridNetwork& net, std::span<const double> parent_values,
                   RandomStream& rng, std::uint64_t* clamp_counter) const {
  if (parent_values.size() != parents.size()) {
    throw std::invalid_argument("cpd sample: parent value count mismatch");
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    check_in_domain(net, parents[i], parent_values[i]);
  }
  const Variable& cv = net.var(child);

  switch (kind()) {
    case CpdKind::Table: {
      const auto& t = std::get<TableCpd>(body);
      const auto& row = t.rows[discrete_block_index(net, parent_values)];
      return static_cast<double>(rng.categorical(row));
    }
    case CpdKind::Clg: {
      const auto& c = std::get<ClgCpd>(body);
      const ClgBlock& b = c.blocks[discrete_block_index(net, parent_values)];
      double mean = b.intercept;
      std::size_t k = 0;
      for (std::size_t i = 0; i < parents.size(); ++i) {
        if (net.var(parents[i]).is_continuous()) mean += b.weights[k++] * parent_values[i];
      }
      double x = rng.normal(mean, std::sqrt(b.variance));
      if (x < cv.lower || x > cv.upper) {
        x = std::min(std::max(x, cv.lower), cv.upper);
        if (clamp_counter) ++*clamp_counter;
      }
      return x;
    }
    case CpdKind::Softmax: {
      const auto& s = std::get<SoftmaxCpd>(body);
      const SoftmaxBlock& b = s.blocks[discrete_block_index(net, parent_values)];
      const auto z = continuous_parent_values(net, *this, parent_values);
      const auto w = softmax_weights(b, z);
      std::vector<double> p(cv.cardinality, 0.0);
      for (std::size_t r = 0; r < w.size(); ++r) {
        for (int j = 0; j < cv.cardinality; ++j) p[j] += w[r] * b.regions[r].p[j];
      }
      return static_cast<double>(rng.categorical(p));
    }
    case CpdKind::Uniform:
      return rng.uniform(cv.lower, cv.upper);
  }
  throw std::logic_error("cpd sample: unknown kind");
}

}  // namespace hbn
