#include "hybridbn/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hbn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kVarFloor = 1e-12;      // only reachable with lambda == 0
constexpr double kDeadComponent = 1e-8;  // responsibility share that flags a starved component

double component_log_density(const DiagonalGmm& g, int k, std::span<const double> x) {
  double ll = 0.0;
  for (int i = 0; i < g.dims; ++i) {
    const double v = g.variances[static_cast<std::size_t>(k) * g.dims + i];
    const double d = x[i] - g.means[static_cast<std::size_t>(k) * g.dims + i];
    ll += -0.5 * (kLog2Pi + std::log(v) + d * d / v);
  }
  return ll;
}

}  // namespace

double DiagonalGmm::log_density(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dims) {
    throw std::invalid_argument("gmm log_density: dimension mismatch");
  }
  if (components() == 0) throw std::logic_error("gmm log_density: empty model");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> ll(weights.size());
  for (int k = 0; k < components(); ++k) {
    ll[k] = std::log(weights[k]) + component_log_density(*this, k, x);
    best = std::max(best, ll[k]);
  }
  if (!std::isfinite(best)) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (double l : ll) s += std::exp(l - best);
  return best + std::log(s);
}

double DiagonalGmm::density(std::span<const double> x) const {
  return std::exp(log_density(x));
}

void DiagonalGmm::sample(RandomStream& rng, std::span<double> out) const {
  const int k = rng.categorical(weights);
  for (int i = 0; i < dims; ++i) {
    out[i] = rng.normal(means[static_cast<std::size_t>(k) * dims + i],
                        std::sqrt(variances[static_cast<std::size_t>(k) * dims + i]));
  }
}

DiagonalGmm DiagonalGmm::marginal(std::span<const int> keep_dims) const {
  DiagonalGmm out;
  out.dims = static_cast<int>(keep_dims.size());
  out.weights = weights;
  out.means.resize(weights.size() * keep_dims.size());
  out.variances.resize(weights.size() * keep_dims.size());
  for (int k = 0; k < components(); ++k) {
    for (std::size_t i = 0; i < keep_dims.size(); ++i) {
      out.means[k * keep_dims.size() + i] =
          means[static_cast<std::size_t>(k) * dims + keep_dims[i]];
      out.variances[k * keep_dims.size() + i] =
          variances[static_cast<std::size_t>(k) * dims + keep_dims[i]];
    }
  }
  return out;
}

double gmm_regularized_error(const DiagonalGmm& model, std::span<const double> data,
                             std::span<const double> weights, double lambda) {
  const std::size_t m = weights.size();
  double err = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (weights[r] == 0.0) continue;
    err -= weights[r] * model.log_density(data.subspan(r * model.dims, model.dims));
  }
  for (double v : model.variances) err += lambda / (2.0 * v);
  return err;
}

EmResult fit_gmm(std::span<const double> data, int dims,
                 std::span<const double> weights, const EmConfig& cfg) {
  if (dims <= 0) throw std::invalid_argument("fit_gmm: dims must be positive");
  if (weights.empty() || data.size() != weights.size() * static_cast<std::size_t>(dims)) {
    throw std::invalid_argument("fit_gmm: data/weight size mismatch");
  }
  const std::size_t m = weights.size();
  double total_weight = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("fit_gmm: weights must be finite and nonnegative");
    }
    total_weight += w;
  }
  if (!(total_weight > 0.0)) throw std::invalid_argument("fit_gmm: all weights are zero");

  const int K = std::max(1, std::min(cfg.components, static_cast<int>(m)));
  RandomStream rng(cfg.seed);

  // Global weighted moments seed the variances.
  std::vector<double> gmean(dims, 0.0), gvar(dims, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (int i = 0; i < dims; ++i) gmean[i] += weights[r] * data[r * dims + i];
  }
  for (int i = 0; i < dims; ++i) gmean[i] /= total_weight;
  for (std::size_t r = 0; r < m; ++r) {
    for (int i = 0; i < dims; ++i) {
      const double d = data[r * dims + i] - gmean[i];
      gvar[i] += weights[r] * d * d;
    }
  }
  for (int i = 0; i < dims; ++i) {
    gvar[i] = std::max(gvar[i] / total_weight, 1e-8) + cfg.lambda / total_weight;
  }

  DiagonalGmm g;
  g.dims = dims;
  g.weights.assign(K, 1.0 / K);
  g.means.resize(static_cast<std::size_t>(K) * dims);
  g.variances.resize(static_cast<std::size_t>(K) * dims);

  // Weighted k-means++ style seeding: first center by weight, the rest by
  // weight times squared distance to the nearest chosen center.
  std::vector<std::size_t> centers;
  centers.push_back(static_cast<std::size_t>(rng.categorical(weights)));
  std::vector<double> d2(m);
  while (static_cast<int>(centers.size()) < K) {
    for (std::size_t r = 0; r < m; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c : centers) {
        double d = 0.0;
        for (int i = 0; i < dims; ++i) {
          const double diff = data[r * dims + i] - data[c * dims + i];
          d += diff * diff;
        }
        best = std::min(best, d);
      }
      d2[r] = weights[r] * best;
    }
    double mass = 0.0;
    for (double x : d2) mass += x;
    if (mass > 0.0) {
      centers.push_back(static_cast<std::size_t>(rng.categorical(d2)));
    } else {  // all remaining points coincide with a center
      centers.push_back(static_cast<std::size_t>(rng.categorical(weights)));
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < dims; ++i) {
      g.means[static_cast<std::size_t>(k) * dims + i] = data[centers[k] * dims + i];
      g.variances[static_cast<std::size_t>(k) * dims + i] = gvar[i];
    }
  }

  EmResult res;
  std::vector<double> resp;
  std::vector<double> loglik;
  bool model_dirty = false;  // an M-step ran after the last recorded error
  double prev_err = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    resp.assign(m * static_cast<std::size_t>(K), 0.0);
    loglik.assign(K, 0.0);

    // E-step in log space; resp gets the weight-scaled responsibilities.
    double err = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const auto x = data.subspan(r * dims, dims);
      double best = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        loglik[k] = g.weights[k] > 0.0
                        ? std::log(g.weights[k]) + component_log_density(g, k, x)
                        : -std::numeric_limits<double>::infinity();
        best = std::max(best, loglik[k]);
      }
      double s = 0.0;
      for (int k = 0; k < K; ++k) s += std::exp(loglik[k] - best);
      const double lse = best + std::log(s);
      err -= weights[r] * lse;
      for (int k = 0; k < K; ++k) {
        resp[r * K + k] = std::isfinite(loglik[k]) ? weights[r] * std::exp(loglik[k] - lse) : 0.0;
      }
    }
    for (double v : g.variances) err += cfg.lambda / (2.0 * v);

    res.error_trace.push_back(err);
    res.iterations = iter + 1;
    model_dirty = false;
    if (iter > 0 && prev_err - err < cfg.tolerance) break;
    prev_err = err;

    // M-step: the exact maximizer of the penalized expected complete-data
    // objective, so the recorded error never increases. A component whose
    // responsibility mass underflows to zero keeps its parameters; its weight
    // hits zero and the E-step ignores it from then on. Moving or re-seeding
    // starved components here would break the monotone-descent guarantee.
    for (int k = 0; k < K; ++k) {
      double nk = 0.0;
      for (std::size_t r = 0; r < m; ++r) nk += resp[r * K + k];
      if (nk < kDeadComponent * total_weight) res.degenerate_warning = true;
      g.weights[k] = nk / total_weight;
      if (nk == 0.0) continue;
      for (int i = 0; i < dims; ++i) {
        double mu = 0.0;
        for (std::size_t r = 0; r < m; ++r) mu += resp[r * K + k] * data[r * dims + i];
        mu /= nk;
        double scatter = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          const double d = data[r * dims + i] - mu;
          scatter += resp[r * K + k] * d * d;
        }
        g.means[static_cast<std::size_t>(k) * dims + i] = mu;
        g.variances[static_cast<std::size_t>(k) * dims + i] =
            std::max((scatter + cfg.lambda) / nk, kVarFloor);
      }
    }
    model_dirty = true;
  }

  if (model_dirty) {
    res.error_trace.push_back(gmm_regularized_error(g, data, weights, cfg.lambda));
  }
  res.model = std::move(g);
  return res;
}

}  // namespace hbn
