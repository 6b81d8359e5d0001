#include "hybridbn/approx_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hybridbn/discretize.hpp"
#include "hybridbn/errors.hpp"
#include "hybridbn/sampler.hpp"

namespace hbn {

namespace {

constexpr double kLowEssWarning = 10.0;

// Root-first clique order plus each clique's edge toward the root.
void tree_order(const CliqueTree& tree, std::vector<int>& order,
                std::vector<int>& parent_edge) {
  order.clear();
  parent_edge.assign(tree.cliques.size(), -1);
  if (tree.cliques.empty()) return;
  std::vector<char> seen(tree.cliques.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    order.push_back(i);
    for (int e : tree.adjacency[i]) {
      const int j = tree.neighbor_across(e, i);
      if (!seen[j]) {
        seen[j] = 1;
        parent_edge[j] = e;
        stack.push_back(j);
      }
    }
  }
}

// Truncated importance weights, mean-1 normalized: anything past sqrt(M)
// times the raw mean is cut down to it. The cap buys a bounded worst-case
// weight variance for a bias that vanishes as O(1/sqrt(M)), so refinement
// fits stop being yanked around by a handful of dominant draws.
void normalize_weights(WeightedSampleSet& s) {
  double total = 0.0;
  for (double w : s.weights) total += w;
  if (total <= 0.0) {
    s.diag.all_zero = true;
    return;
  }
  const double m = static_cast<double>(s.weights.size());
  const double cap = (total / m) * std::sqrt(m);
  total = 0.0;
  for (double& w : s.weights) {
    if (w > cap) {
      w = cap;
      ++s.diag.clipped;
    }
    total += w;
  }
  const double scale = m / total;
  for (double& w : s.weights) w *= scale;
}

}  // namespace

int ApproxState::message_index(int edge, int from_clique) const {
  return 2 * edge + (tree.edges[edge].a == from_clique ? 0 : 1);
}

double ApproxState::target_eval(int clique, int exclude_edge,
                                std::span<const double> x) const {
  const auto& scope = reduced_scope[clique];

  // Every continuous coordinate must stay inside its range; proposals can
  // overshoot because leaf Gaussians have unbounded support.
  for (std::size_t i = 0; i < scope.size(); ++i) {
    const Variable& v = net->var(scope[i]);
    if (v.is_continuous() && (x[i] < v.lower || x[i] > v.upper)) return 0.0;
  }

  auto value_of = [&](int var) {
    auto it = std::lower_bound(scope.begin(), scope.end(), var);
    if (it != scope.end() && *it == var) return x[it - scope.begin()];
    return evidence.at(var);
  };

  double t = 1.0;
  for (int e : tree.adjacency[clique]) {
    if (e == exclude_edge) continue;
    const int from = tree.neighbor_across(e, clique);
    const int slot = message_index(e, from);
    if (!message_set[slot]) continue;
    const DensityTree& msg = messages[slot];
    std::vector<double> y(msg.scope.size());
    for (std::size_t i = 0; i < msg.scope.size(); ++i) y[i] = value_of(msg.scope[i]);
    t *= msg.eval(y);
    if (t == 0.0) return 0.0;
  }

  std::vector<double> parent_values;
  for (int c : tree.cliques[clique].cpd_indices) {
    const Cpd& cpd = net->cpds[c];
    parent_values.resize(cpd.parents.size());
    for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
      parent_values[i] = value_of(cpd.parents[i]);
    }
    t *= cpd.eval(*net, value_of(cpd.child), parent_values);
    if (t == 0.0) return 0.0;
  }

  for (int v : uniform_vars[clique]) {
    const Variable& var = net->var(v);
    t *= var.is_continuous() ? 1.0 / var.width() : 1.0 / var.cardinality;
  }
  return t;
}

namespace {

// Draws samples_per_clique rows from the defensive mixture — mostly the
// current estimate, with an `st.mix` share from the broad forward-sample
// tree so coverage never collapses — and appends them to the clique's pool
// together with the exact density they were drawn under. Blocks beyond
// config.pool_blocks fall off the old end.
void draw_into_pool(ApproxState& st, int clique, const DensityTree& current,
                    RandomStream rng) {
  const auto& scope = st.reduced_scope[clique];
  const DensityTree& prior = st.prior_proposals[clique];
  const bool mix = &current != &prior && st.mix > 0.0;
  const double beta = mix ? st.mix : 0.0;

  auto& pool = st.pool_values[clique];
  auto& pool_q = st.pool_q[clique];
  const std::size_t m = st.config.samples_per_clique;
  const std::size_t d = scope.size();
  const std::size_t keep =
      m * static_cast<std::size_t>(std::max(st.config.pool_blocks, 1));
  if (pool_q.size() >= keep) {
    const std::size_t drop = pool_q.size() - (keep - m);
    pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(drop * d));
    pool_q.erase(pool_q.begin(), pool_q.begin() + static_cast<std::ptrdiff_t>(drop));
  }

  const std::size_t base = pool_q.size();
  pool.resize((base + m) * d);
  pool_q.resize(base + m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::span<double> row{pool.data() + (base + r) * d, d};
    const bool from_prior = mix && rng.uniform01() < beta;
    (from_prior ? prior : current).sample(rng, row);
    double q = current.eval(row);
    if (mix) q = beta * prior.eval(row) + (1.0 - beta) * q;
    pool_q[base + r] = q;
  }
}

// Weighs the clique's whole pool against the current refinement target.
// Each row's weight is target / its own drawing density, so rows drawn
// under earlier proposals stay valid: stale draws that the calibrated
// target no longer supports simply get small weights. Fitting on the pool
// instead of one fresh block is what makes a later sweep better than an
// earlier one even after the proposal has stopped moving.
WeightedSampleSet pooled_set(const ApproxState& st, int clique, int exclude_edge) {
  const auto& scope = st.reduced_scope[clique];
  const auto& pool = st.pool_values[clique];
  const auto& pool_q = st.pool_q[clique];

  WeightedSampleSet s;
  s.scope = scope;
  s.values = pool;
  s.weights.resize(pool_q.size());
  const std::size_t d = scope.size();
  for (std::size_t r = 0; r < pool_q.size(); ++r) {
    const std::span<const double> row{pool.data() + r * d, d};
    s.weights[r] = pool_q[r] > 0.0
                       ? st.target_eval(clique, exclude_edge, row) / pool_q[r]
                       : 0.0;
  }
  normalize_weights(s);
  return s;
}

struct SweepStats {
  double min_ess = std::numeric_limits<double>::infinity();
};

void refine_potential(ApproxState& st, int clique, bool first_touch,
                      bool calibrating, SweepStats& stats) {
  if (st.reduced_scope[clique].empty()) {
    st.potentials[clique] = dt_unit();
    return;
  }
  const DensityTree& prop =
      first_touch ? st.prior_proposals[clique] : st.potentials[clique];
  draw_into_pool(st, clique, prop,
                 RandomStream(st.config.seed).derive(st.task_counter++));
  WeightedSampleSet s = pooled_set(st, clique, -1);
  if (s.diag.all_zero) {
    if (calibrating) {
      throw DegeneracyError("no sample hit positive probability while calibrating clique " +
                            std::to_string(clique));
    }
    st.warnings.push_back("clique " + std::to_string(clique) +
                          ": refinement kept the previous estimate (all weights zero)");
    stats.min_ess = 0.0;
    return;
  }
  const double ess = s.effective_sample_size();
  stats.min_ess = std::min(stats.min_ess, ess);
  if (ess < kLowEssWarning) {
    st.warnings.push_back("clique " + std::to_string(clique) +
                          ": effective sample size " + std::to_string(ess));
  }
  DtConfig cfg = st.config.dt;
  cfg.seed = RandomStream(st.config.seed).derive(st.task_counter++).seed();
  st.potentials[clique] = dt_learn(s, *st.net, cfg);
}

void send_message(ApproxState& st, int clique, int edge, bool calibrating,
                  SweepStats& stats) {
  const int slot = st.message_index(edge, clique);
  if (st.reduced_sepset[edge].empty()) {
    st.messages[slot] = dt_unit();
    st.message_set[slot] = 1;
    return;
  }
  // Messages reuse the clique's pool: the sweep refines the potential right
  // before sending, so the newest block is already drawn from it, and the
  // edge-excluded target only changes the weights.
  WeightedSampleSet s = pooled_set(st, clique, edge);
  if (s.diag.all_zero) {
    if (calibrating) {
      throw DegeneracyError("no sample hit positive probability while calibrating clique " +
                            std::to_string(clique));
    }
    st.warnings.push_back("edge " + std::to_string(edge) +
                          ": message kept the previous estimate (all weights zero)");
    stats.min_ess = 0.0;
    return;
  }
  const double ess = s.effective_sample_size();
  stats.min_ess = std::min(stats.min_ess, ess);
  WeightedSampleSet projected = s.project(st.reduced_sepset[edge]);
  DtConfig cfg = st.config.dt;
  cfg.seed = RandomStream(st.config.seed).derive(st.task_counter++).seed();
  st.messages[slot] = dt_learn(projected, *st.net, cfg);
  st.message_set[slot] = 1;
}

// Adapts the defensive share after a sweep: a degenerate sweep (worst ESS
// under defend_ess) re-arms the full share, a healthy one halves it. While
// defended, a low ESS genuinely witnesses that the estimates still miss
// target mass, since the broad draws probe everywhere the prior reaches.
void adapt_mix(ApproxState& st, const SweepStats& stats) {
  st.mix = stats.min_ess < st.config.defend_ess ? st.config.defensive_mix
                                                : 0.5 * st.mix;
}

// One full sweep: refine on the way to the root sending upward messages,
// then refine on the way back down sending the rest. Proposals are always
// the freshest potential of the sending clique; a clique's very first
// refinement ever starts from its forward-sample tree instead.
SweepStats sweep(ApproxState& st, bool calibrating) {
  std::vector<int> order, parent_edge;
  tree_order(st.tree, order, parent_edge);
  SweepStats stats;
  std::vector<char> touched(st.tree.cliques.size(), 0);

  auto first_touch = [&](int i) {
    const bool first = calibrating && !touched[i];
    touched[i] = 1;
    return first;
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    refine_potential(st, *it, first_touch(*it), calibrating, stats);
    if (parent_edge[*it] >= 0) send_message(st, *it, parent_edge[*it], calibrating, stats);
  }
  for (int i : order) {
    refine_potential(st, i, first_touch(i), calibrating, stats);
    for (int e : st.tree.adjacency[i]) {
      if (e != parent_edge[i]) send_message(st, i, e, calibrating, stats);
    }
  }
  return stats;
}

std::vector<std::vector<double>> marginal_snapshot(const ApproxState& st) {
  std::vector<std::vector<double>> out;
  for (int v = 0; v < st.net->num_variables(); ++v) {
    if (st.evidence.contains(v)) continue;
    out.push_back(approx_marginal(st, v));
  }
  return out;
}

}  // namespace

ApproxState approx_init(const HybridNetwork& net, const Evidence& ev,
                        const ApproxConfig& cfg) {
  {
    auto rep = validate_evidence(net, ev);
    if (!rep.ok()) throw std::invalid_argument("bad evidence: " + rep.to_string());
  }
  ApproxState st;
  st.net = &net;
  st.evidence = ev;
  st.config = cfg;
  st.tree = build_clique_tree(net);

  const int nc = st.tree.num_cliques();
  st.reduced_scope.resize(nc);
  st.uniform_vars.resize(nc);
  for (int i = 0; i < nc; ++i) {
    for (int v : st.tree.cliques[i].vars) {
      if (!ev.contains(v)) st.reduced_scope[i].push_back(v);
    }
  }
  st.reduced_sepset.resize(st.tree.edges.size());
  for (std::size_t e = 0; e < st.tree.edges.size(); ++e) {
    for (int v : st.tree.edges[e].sepset) {
      if (!ev.contains(v)) st.reduced_sepset[e].push_back(v);
    }
  }

  // A clique variable that appears in no incident sepset and is no ascribed
  // factor's child has no covering factor; it enters the target as a flat
  // box density. The set is fixed up front so refinement targets that
  // exclude one message stay consistent with the full product.
  for (int i = 0; i < nc; ++i) {
    std::set<int> covered;
    for (int e : st.tree.adjacency[i]) {
      covered.insert(st.reduced_sepset[e].begin(), st.reduced_sepset[e].end());
    }
    for (int c : st.tree.cliques[i].cpd_indices) covered.insert(net.cpds[c].child);
    for (int v : st.reduced_scope[i]) {
      if (!covered.count(v)) st.uniform_vars[i].push_back(v);
    }
  }

  st.potentials.assign(nc, dt_unit());
  st.messages.assign(2 * st.tree.edges.size(), dt_unit());
  st.message_set.assign(2 * st.tree.edges.size(), 0);

  // Calibration proposals: density trees fitted to plain forward samples,
  // projected onto each clique's unobserved scope. They are kept around as
  // the broad component of every later proposal mixture.
  RandomStream prior_rng = RandomStream(cfg.seed).derive(st.task_counter++);
  WeightedSampleSet prior = prior_sample(net, cfg.samples_per_clique, prior_rng);
  st.prior_proposals.assign(nc, dt_unit());
  for (int i = 0; i < nc; ++i) {
    if (st.reduced_scope[i].empty()) continue;
    DtConfig dcfg = st.config.dt;
    dcfg.seed = RandomStream(cfg.seed).derive(st.task_counter++).seed();
    st.prior_proposals[i] = dt_learn(prior.project(st.reduced_scope[i]), net, dcfg);
  }

  st.mix = cfg.defensive_mix;
  const SweepStats stats = sweep(st, /*calibrating=*/true);
  adapt_mix(st, stats);
  st.passes_done = 1;
  st.trace.push_back({1, 1.0, stats.min_ess});
  return st;
}

void approx_run(ApproxState& st, int total_passes) {
  if (st.passes_done >= total_passes) return;
  auto prev = marginal_snapshot(st);
  while (st.passes_done < total_passes) {
    const SweepStats stats = sweep(st, /*calibrating=*/false);
    adapt_mix(st, stats);
    ++st.passes_done;
    auto cur = marginal_snapshot(st);
    double max_tv = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double tv = 0.0;
      for (std::size_t k = 0; k < cur[i].size(); ++k) {
        tv += std::abs(cur[i][k] - prev[i][k]);
      }
      max_tv = std::max(max_tv, 0.5 * tv);
    }
    st.trace.push_back({st.passes_done, max_tv, stats.min_ess});
    prev = std::move(cur);
    if (max_tv < st.config.early_stop_tv) break;
  }
}

std::vector<double> approx_marginal(const ApproxState& st, int var) {
  const Variable& v = st.net->var(var);
  if (st.evidence.contains(var)) {
    if (v.is_discrete()) {
      std::vector<double> pmf(v.cardinality, 0.0);
      pmf[static_cast<int>(st.evidence.at(var))] = 1.0;
      return pmf;
    }
    std::vector<double> hist(st.config.histogram_bins, 0.0);
    hist[bin_index(v.lower, v.upper, st.config.histogram_bins, st.evidence.at(var))] = 1.0;
    return hist;
  }

  int best = -1;
  for (int i = 0; i < st.tree.num_cliques(); ++i) {
    const auto& scope = st.reduced_scope[i];
    if (!std::binary_search(scope.begin(), scope.end(), var)) continue;
    if (best < 0 || scope.size() < st.reduced_scope[best].size()) best = i;
  }
  if (best < 0) throw std::invalid_argument("variable not covered by any clique");

  if (v.is_discrete()) return dt_discrete_marginal(st.potentials[best], var);
  return dt_continuous_histogram(st.potentials[best], var, v.lower, v.upper,
                                 st.config.histogram_bins);
}

}  // namespace hbn
