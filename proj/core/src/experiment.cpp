#include "hybridbn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hybridbn/benchmark_nets.hpp"
#include "hybridbn/csv.hpp"
#include "hybridbn/discretize.hpp"
#include "hybridbn/exact_engine.hpp"
#include "hybridbn/metrics.hpp"
#include "hybridbn/sampler.hpp"

namespace hbn {

ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "iterations") return ExperimentKind::Iterations;
  if (name == "samples") return ExperimentKind::Samples;
  if (name == "lambda") return ExperimentKind::Lambda;
  if (name == "lw-comparison") return ExperimentKind::LwComparison;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Iterations: return "iterations";
    case ExperimentKind::Samples: return "samples";
    case ExperimentKind::Lambda: return "lambda";
    case ExperimentKind::LwComparison: return "lw-comparison";
  }
  throw std::logic_error("unreachable");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Ground truth on the shared grid: exact propagation on the bin-discretized
// network. Continuous queries come back over exactly `bins` states, so they
// line up bin-for-bin with the approximate histograms.
std::vector<std::vector<double>> reference_marginals(const HybridNetwork& net,
                                                     const Evidence& ev,
                                                     const std::vector<int>& queries,
                                                     int bins) {
  HybridNetwork dnet = discretize_network(net, bins);
  Evidence dev = discretize_evidence(net, ev, bins);
  ExactResult res = exact_propagate(dnet, dev);
  std::vector<std::vector<double>> out;
  out.reserve(queries.size());
  for (int q : queries) out.push_back(exact_marginal(res, q));
  return out;
}

double mean_kl(const std::vector<std::vector<double>>& ref,
               const std::vector<std::vector<double>>& est) {
  double total = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    total += kl_divergence(ref[i], est[i]);
  }
  return total / static_cast<double>(ref.size());
}

std::vector<std::vector<double>> approx_marginals(const ApproxState& st,
                                                  const std::vector<int>& queries) {
  std::vector<std::vector<double>> out;
  out.reserve(queries.size());
  for (int q : queries) out.push_back(approx_marginal(st, q));
  return out;
}

void log_row(std::ostream* log, const ExperimentRow& r) {
  if (!log) return;
  *log << r.experiment << " parameter=" << format_number(r.parameter)
       << " seed=" << r.seed << " kl=" << format_number(r.kl_error)
       << " t=" << format_number(r.seconds) << "s\n";
}

// Sweeps total pass counts on one scenario. Passes are nested (a run to k
// passes is the prefix of a run to k+1), so each seed runs one engine and
// reports cumulative inference time at every requested count.
void run_iterations(const ExperimentSpec& spec, const std::string& label,
                    const HybridNetwork& net, const Scenario& sc,
                    std::vector<ExperimentRow>& rows, std::ostream* log) {
  auto ref = reference_marginals(net, sc.evidence, sc.query_vars,
                                 spec.base.histogram_bins);
  std::vector<double> params = spec.parameters;
  std::sort(params.begin(), params.end());
  for (uint64_t seed : spec.seeds) {
    ApproxConfig cfg = spec.base;
    cfg.seed = seed;
    cfg.early_stop_tv = 0.0;
    auto t0 = Clock::now();
    ApproxState st = approx_init(net, sc.evidence, cfg);
    double elapsed = seconds_since(t0);
    for (double p : params) {
      const int passes = static_cast<int>(std::llround(p));
      if (passes > st.passes_done) {
        t0 = Clock::now();
        approx_run(st, passes);
        elapsed += seconds_since(t0);
      }
      ExperimentRow r{label, p, seed, mean_kl(ref, approx_marginals(st, sc.query_vars)),
                      elapsed};
      log_row(log, r);
      rows.push_back(std::move(r));
    }
  }
}

// One full approximate run per (parameter, seed); `tweak` applies the swept
// parameter to the config.
template <class Tweak>
void run_config_sweep(const ExperimentSpec& spec, const std::string& label,
                      const HybridNetwork& net, const Scenario& sc, Tweak tweak,
                      std::vector<ExperimentRow>& rows, std::ostream* log) {
  auto ref = reference_marginals(net, sc.evidence, sc.query_vars,
                                 spec.base.histogram_bins);
  for (double p : spec.parameters) {
    for (uint64_t seed : spec.seeds) {
      ApproxConfig cfg = spec.base;
      cfg.seed = seed;
      cfg.early_stop_tv = 0.0;
      tweak(cfg, p);
      auto t0 = Clock::now();
      ApproxState st = approx_init(net, sc.evidence, cfg);
      approx_run(st, cfg.passes);
      const double elapsed = seconds_since(t0);
      ExperimentRow r{label, p, seed, mean_kl(ref, approx_marginals(st, sc.query_vars)),
                      elapsed};
      log_row(log, r);
      rows.push_back(std::move(r));
    }
  }
}

// Likelihood weighting with a wall-clock budget: keeps drawing chunks until
// `budget_seconds` has elapsed (at least one chunk), accumulating marginal
// tallies instead of rows so the sample count is unbounded.
std::vector<std::vector<double>> lw_marginals_within(
    const HybridNetwork& net, const Evidence& ev, const std::vector<int>& queries,
    int bins, double budget_seconds, uint64_t seed, double* out_seconds) {
  constexpr std::size_t kChunk = 1000;
  std::vector<std::vector<double>> tally;
  for (int q : queries) {
    const Variable& v = net.var(q);
    tally.emplace_back(v.is_discrete() ? v.cardinality : bins, 0.0);
  }
  RandomStream rng(seed);
  const auto t0 = Clock::now();
  do {
    WeightedSampleSet s = likelihood_weighting(net, ev, kChunk, rng);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const Variable& v = net.var(queries[i]);
      const int col = s.scope_pos(queries[i]);
      for (std::size_t r = 0; r < s.rows(); ++r) {
        const double x = s.row(r)[col];
        const int cell = v.is_discrete()
                             ? static_cast<int>(x)
                             : bin_index(v.lower, v.upper, bins, x);
        tally[i][cell] += s.weights[r];
      }
    }
  } while (seconds_since(t0) < budget_seconds);
  *out_seconds = seconds_since(t0);

  for (auto& t : tally) {
    double total = 0.0;
    for (double x : t) total += x;
    if (total > 0.0) {
      for (double& x : t) x /= total;
    } else {
      // No sample survived the evidence; report the no-information estimate.
      std::fill(t.begin(), t.end(), 1.0 / static_cast<double>(t.size()));
    }
  }
  return tally;
}

void run_lw_comparison(const ExperimentSpec& spec,
                       std::vector<ExperimentRow>& rows, std::ostream* log) {
  HybridNetwork net = traffic_network();
  for (double p : spec.parameters) {
    Scenario sc;
    if (p < 2.0) {
      sc.name = "traffic-single";
      sc.evidence.values[12] = 3.0;  // one x-velocity reading, middle slice
      sc.query_vars = {20, 23, 26, 28};
    } else {
      sc = traffic_drift(net);
    }
    auto ref = reference_marginals(net, sc.evidence, sc.query_vars,
                                   spec.base.histogram_bins);
    for (uint64_t seed : spec.seeds) {
      ApproxConfig cfg = spec.base;
      cfg.seed = seed;
      cfg.early_stop_tv = 0.0;
      auto t0 = Clock::now();
      ApproxState st = approx_init(net, sc.evidence, cfg);
      approx_run(st, cfg.passes);
      const double budget = seconds_since(t0);
      ExperimentRow ra{"lw-comparison-approx", p, seed,
                       mean_kl(ref, approx_marginals(st, sc.query_vars)), budget};
      log_row(log, ra);
      rows.push_back(std::move(ra));

      double lw_seconds = 0.0;
      auto est = lw_marginals_within(net, sc.evidence, sc.query_vars,
                                     spec.base.histogram_bins, budget, seed,
                                     &lw_seconds);
      ExperimentRow rl{"lw-comparison-lw", p, seed, mean_kl(ref, est), lw_seconds};
      log_row(log, rl);
      rows.push_back(std::move(rl));
    }
  }
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          std::ostream* log) {
  ExperimentSpec s = spec;
  if (s.seeds.empty()) {
    switch (s.kind) {
      case ExperimentKind::Iterations:
      case ExperimentKind::Lambda: s.seeds = {0, 1, 2, 3, 4}; break;
      case ExperimentKind::Samples:
      case ExperimentKind::LwComparison: s.seeds = {0, 1, 2}; break;
    }
  }
  if (s.parameters.empty()) {
    switch (s.kind) {
      case ExperimentKind::Iterations: s.parameters = {1, 2, 3, 4, 5, 6}; break;
      case ExperimentKind::Samples: s.parameters = {100, 1000, 3000}; break;
      case ExperimentKind::Lambda: s.parameters = {0.001, 0.01, 0.1, 1, 10}; break;
      case ExperimentKind::LwComparison: s.parameters = {1, 12}; break;
    }
  }

  std::vector<ExperimentRow> rows;
  switch (s.kind) {
    case ExperimentKind::Iterations: {
      HybridNetwork net = thermostat_network();
      run_iterations(s, "iterations-easy", net, thermostat_easy(net), rows, log);
      run_iterations(s, "iterations-conflicting", net, thermostat_conflicting(net),
                     rows, log);
      break;
    }
    case ExperimentKind::Samples: {
      // The drift scenario: low budgets genuinely struggle there, so the
      // error-vs-samples trend has room to show. The easy scenario's
      // posterior is found by a handful of draws and flattens the curve.
      HybridNetwork net = traffic_network();
      run_config_sweep(
          s, "samples", net, traffic_drift(net),
          [](ApproxConfig& c, double p) {
            c.samples_per_clique = static_cast<std::size_t>(std::llround(p));
          },
          rows, log);
      break;
    }
    case ExperimentKind::Lambda: {
      HybridNetwork net = thermostat_network();
      run_config_sweep(
          s, "lambda", net, thermostat_easy(net),
          [](ApproxConfig& c, double p) { c.dt.lambda = p; }, rows, log);
      break;
    }
    case ExperimentKind::LwComparison:
      run_lw_comparison(s, rows, log);
      break;
  }
  return rows;
}

void write_experiment_csv(std::ostream& os,
                          const std::vector<ExperimentRow>& rows) {
  os << "experiment,parameter,seed,kl_error,seconds\n";
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << format_number(r.parameter) << ','
       << r.seed << ',' << format_number(r.kl_error) << ','
       << format_number(r.seconds) << '\n';
  }
}

}  // namespace hbn
