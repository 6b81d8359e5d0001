#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hybridbn/gmm.hpp"

using namespace hbn;

namespace {

struct Dataset {
  std::vector<double> data;  // rows x dims
  std::vector<double> weights;
};

Dataset synthetic(int rows, int dims, uint64_t seed, bool unit_weights) {
  Dataset d;
  RandomStream rng(seed);
  d.data.resize(static_cast<std::size_t>(rows) * dims);
  d.weights.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const double center = rng.uniform01() < 0.4 ? -2.5 : 1.5;
    for (int i = 0; i < dims; ++i) {
      d.data[static_cast<std::size_t>(r) * dims + i] = center + rng.normal();
    }
    d.weights[r] = unit_weights ? 1.0 : 0.1 + rng.uniform01();
  }
  return d;
}

}  // namespace

TEST_SUITE("gmm") {

TEST_CASE("single component with lambda 0 is the weighted mean and variance") {
  Dataset d = synthetic(500, 2, 1, false);
  EmConfig cfg;
  cfg.components = 1;
  cfg.lambda = 0.0;
  EmResult res = fit_gmm(d.data, 2, d.weights, cfg);
  REQUIRE(res.model.components() == 1);

  double W = 0.0;
  std::vector<double> mean(2, 0.0);
  for (int r = 0; r < 500; ++r) {
    W += d.weights[r];
    for (int i = 0; i < 2; ++i) mean[i] += d.weights[r] * d.data[r * 2 + i];
  }
  for (auto& m : mean) m /= W;
  std::vector<double> var(2, 0.0);
  for (int r = 0; r < 500; ++r) {
    for (int i = 0; i < 2; ++i) {
      const double c = d.data[r * 2 + i] - mean[i];
      var[i] += d.weights[r] * c * c;
    }
  }
  for (auto& v : var) v /= W;

  for (int i = 0; i < 2; ++i) {
    CHECK(res.model.means[i] == doctest::Approx(mean[i]).epsilon(1e-10));
    CHECK(res.model.variances[i] == doctest::Approx(var[i]).epsilon(1e-10));
  }
}

TEST_CASE("single component with positive lambda adds lambda over total weight") {
  Dataset d = synthetic(400, 1, 2, true);
  EmConfig cfg;
  cfg.components = 1;
  cfg.lambda = 7.5;
  EmResult res = fit_gmm(d.data, 1, d.weights, cfg);

  double mean = 0.0;
  for (double x : d.data) mean += x;
  mean /= 400;
  double var = 0.0;
  for (double x : d.data) var += (x - mean) * (x - mean);
  var /= 400;

  CHECK(res.model.means[0] == doctest::Approx(mean).epsilon(1e-10));
  CHECK(res.model.variances[0] == doctest::Approx(var + 7.5 / 400).epsilon(1e-10));
}

TEST_CASE("regularized error never increases along the trace") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Dataset d = synthetic(300, 2, 100 + seed, seed % 2 == 0);
    EmConfig cfg;
    cfg.components = 4;
    cfg.seed = seed;
    EmResult res = fit_gmm(d.data, 2, d.weights, cfg);
    REQUIRE(res.error_trace.size() >= 1);
    for (std::size_t i = 1; i < res.error_trace.size(); ++i) {
      CHECK(res.error_trace[i] <= res.error_trace[i - 1] + 1e-9);
    }
    // The reported trace must end at the returned model's true error.
    const double err = gmm_regularized_error(res.model, d.data, d.weights, cfg.lambda);
    CHECK(res.error_trace.back() == doctest::Approx(err).epsilon(1e-9));
  }
}

TEST_CASE("variances respect the regularization floor") {
  Dataset d = synthetic(200, 2, 5, false);
  double W = 0.0;
  for (double w : d.weights) W += w;
  EmConfig cfg;
  cfg.components = 6;
  cfg.lambda = 3.0;
  EmResult res = fit_gmm(d.data, 2, d.weights, cfg);
  for (double v : res.model.variances) CHECK(v >= 3.0 / W - 1e-12);
}

TEST_CASE("converged fit sits at a stationary point of the error") {
  Dataset d = synthetic(400, 1, 8, true);
  EmConfig cfg;
  cfg.components = 2;
  cfg.lambda = 2.0;
  cfg.tolerance = 1e-13;
  cfg.max_iterations = 2000;
  EmResult res = fit_gmm(d.data, 1, d.weights, cfg);

  // Central finite differences on every mean and variance.
  const double h = 1e-5;
  DiagonalGmm g = res.model;
  auto err_with = [&](std::vector<double> DiagonalGmm::*field, int idx, double delta) {
    DiagonalGmm probe = g;
    (probe.*field)[idx] += delta;
    return gmm_regularized_error(probe, d.data, d.weights, cfg.lambda);
  };
  for (int k = 0; k < g.components(); ++k) {
    const double gm =
        (err_with(&DiagonalGmm::means, k, h) - err_with(&DiagonalGmm::means, k, -h)) / (2 * h);
    CHECK(std::abs(gm) <= 1e-3);
    const double gv = (err_with(&DiagonalGmm::variances, k, h) -
                       err_with(&DiagonalGmm::variances, k, -h)) /
                      (2 * h);
    CHECK(std::abs(gv) <= 1e-3);
  }
}

TEST_CASE("two separated components are recovered") {
  RandomStream rng(31);
  const int n = 10000;
  std::vector<double> data(n), weights(n, 1.0);
  for (int i = 0; i < n; ++i) {
    data[i] = (rng.uniform01() < 0.5 ? -3.0 : 3.0) + rng.normal();
  }
  EmConfig cfg;
  cfg.components = 2;
  cfg.lambda = 10.0;
  cfg.seed = 2;
  EmResult res = fit_gmm(data, 1, weights, cfg);
  REQUIRE(res.model.components() == 2);
  int lo = res.model.means[0] < res.model.means[1] ? 0 : 1;
  CHECK(std::abs(res.model.means[lo] - -3.0) < 0.15);
  CHECK(std::abs(res.model.means[1 - lo] - 3.0) < 0.15);
  CHECK(std::abs(res.model.weights[lo] - 0.5) < 0.03);
}

TEST_CASE("component count is capped at the sample count") {
  std::vector<double> data{0.0, 1.0, 2.0};
  std::vector<double> weights{1.0, 1.0, 1.0};
  EmConfig cfg;
  cfg.components = 10;
  EmResult res = fit_gmm(data, 1, weights, cfg);
  CHECK(res.model.components() <= 3);
}

TEST_CASE("bad inputs are rejected") {
  EmConfig cfg;
  CHECK_THROWS_AS(fit_gmm({}, 1, {}, cfg), std::invalid_argument);
  std::vector<double> data{1.0, 2.0};
  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(fit_gmm(data, 1, zero, cfg), std::invalid_argument);
}

TEST_CASE("density integrates to one and marginals drop coordinates") {
  Dataset d = synthetic(300, 2, 12, true);
  EmConfig cfg;
  cfg.components = 3;
  cfg.seed = 4;
  DiagonalGmm g = fit_gmm(d.data, 2, d.weights, cfg).model;

  // Riemann integral of the first marginal over a wide interval.
  DiagonalGmm m = g.marginal(std::vector<int>{0});
  REQUIRE(m.dims == 1);
  double integral = 0.0;
  const double lo = -30, hi = 30;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / steps;
    integral += m.density(std::vector<double>{x}) * (hi - lo) / steps;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  // Marginal density equals the integral over the dropped coordinate.
  const double x0 = 0.7;
  double md = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double y = lo + (hi - lo) * (i + 0.5) / steps;
    md += g.density(std::vector<double>{x0, y}) * (hi - lo) / steps;
  }
  CHECK(m.density(std::vector<double>{x0}) == doctest::Approx(md).epsilon(1e-6));
}

TEST_CASE("sampling matches the density histogram") {
  std::vector<double> data;
  RandomStream gen(9);
  for (int i = 0; i < 2000; ++i) data.push_back(gen.uniform01() < 0.3 ? -2 + gen.normal() : 2 + gen.normal());
  std::vector<double> w(data.size(), 1.0);
  EmConfig cfg;
  cfg.components = 2;
  cfg.seed = 7;
  DiagonalGmm g = fit_gmm(data, 1, w, cfg).model;

  RandomStream rng(17);
  const int n = 100000;
  const double lo = -8, hi = 8;
  const int bins = 16;
  std::vector<int> counts(bins, 0);
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(1);
    g.sample(rng, x);
    if (x[0] < lo || x[0] >= hi) continue;
    ++inside;
    ++counts[static_cast<int>((x[0] - lo) / (hi - lo) * bins)];
  }
  CHECK(inside > n * 0.99);
  for (int b = 0; b < bins; ++b) {
    // Expected bin mass by fine Riemann sum over the bin.
    double p = 0.0;
    const int steps = 200;
    for (int i = 0; i < steps; ++i) {
      const double x = lo + (hi - lo) * (b + (i + 0.5) / steps) / bins;
      p += g.density(std::vector<double>{x}) * (hi - lo) / (bins * steps);
    }
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[b] / static_cast<double>(n) - p) <= 3 * se + 1e-4);
  }
}

}  // TEST_SUITE
