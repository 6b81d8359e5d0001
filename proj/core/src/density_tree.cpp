#include "hybridbn/density_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hybridbn/cpd.hpp"
#include "hybridbn/errors.hpp"

namespace hbn {

namespace {

constexpr double kEdgeFloor = 1e-9;

void floor_and_normalize(std::vector<double>& p) {
  double total = 0.0;
  for (double& x : p) {
    x = std::max(x, kEdgeFloor);
    total += x;
  }
  for (double& x : p) x /= total;
}

}  // namespace

int DensityTree::scope_pos(int var) const {
  auto it = std::lower_bound(scope.begin(), scope.end(), var);
  if (it == scope.end() || *it != var) return -1;
  return static_cast<int>(it - scope.begin());
}

double DensityTree::eval(std::span<const double> x) const {
  if (x.size() != scope.size()) {
    throw std::invalid_argument("density tree eval: point has wrong arity");
  }
  std::function<double(int)> rec = [&](int n) -> double {
    const DtNode& node = nodes[n];
    if (node.is_leaf()) {
      double d = 1.0;
      for (std::size_t i = 0; i < node.leaf_disc.size(); ++i) {
        const int s = static_cast<int>(x[scope_pos(node.leaf_disc[i])]);
        d *= node.pmfs[i][s];
      }
      if (!node.leaf_cont.empty()) {
        std::vector<double> y(node.leaf_cont.size());
        for (std::size_t i = 0; i < node.leaf_cont.size(); ++i) {
          y[i] = x[scope_pos(node.leaf_cont[i])];
        }
        d *= node.gmm.density(y);
      }
      return d;
    }
    if (node.is_mixture()) {
      double d = 0.0;
      for (std::size_t b = 0; b < node.children.size(); ++b) {
        if (node.edge_probs[b] > 0.0) d += node.edge_probs[b] * rec(node.children[b]);
      }
      return d;
    }
    const int b = static_cast<int>(x[scope_pos(node.split_var)]);
    return node.edge_probs[b] * rec(node.children[b]);
  };
  return rec(root);
}

void DensityTree::sample(RandomStream& rng, std::span<double> out) const {
  if (out.size() != scope.size()) {
    throw std::invalid_argument("density tree sample: output has wrong arity");
  }
  int n = root;
  while (!nodes[n].is_leaf()) {
    const DtNode& node = nodes[n];
    const int b = rng.categorical(node.edge_probs);
    if (!node.is_mixture()) out[scope_pos(node.split_var)] = static_cast<double>(b);
    n = node.children[b];
  }
  const DtNode& leaf = nodes[n];
  for (std::size_t i = 0; i < leaf.leaf_disc.size(); ++i) {
    out[scope_pos(leaf.leaf_disc[i])] = static_cast<double>(rng.categorical(leaf.pmfs[i]));
  }
  if (!leaf.leaf_cont.empty()) {
    std::vector<double> y(leaf.leaf_cont.size());
    leaf.gmm.sample(rng, y);
    for (std::size_t i = 0; i < leaf.leaf_cont.size(); ++i) {
      out[scope_pos(leaf.leaf_cont[i])] = y[i];
    }
  }
}

int DensityTree::num_leaves() const {
  int count = 0;
  for (const auto& n : nodes) count += n.is_leaf() ? 1 : 0;
  return count;
}

int DensityTree::depth() const {
  std::function<int(int)> rec = [&](int n) -> int {
    if (nodes[n].is_leaf()) return 0;
    int d = 0;
    for (int c : nodes[n].children) d = std::max(d, rec(c));
    return d + 1;
  };
  return nodes.empty() ? 0 : rec(root);
}

std::string DensityTree::to_string(const HybridNetwork& net) const {
  std::ostringstream os;
  os << "scope {";
  for (std::size_t i = 0; i < scope.size(); ++i) {
    if (i) os << ", ";
    os << net.var(scope[i]).name;
  }
  os << "}\n";
  std::function<void(int, int)> rec = [&](int n, int indent) {
    const DtNode& node = nodes[n];
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (node.is_leaf()) {
      os << pad << "leaf";
      for (std::size_t i = 0; i < node.leaf_disc.size(); ++i) {
        os << ' ' << net.var(node.leaf_disc[i]).name << "(";
        for (std::size_t s = 0; s < node.pmfs[i].size(); ++s) {
          if (s) os << ' ';
          os << node.pmfs[i][s];
        }
        os << ")";
      }
      if (!node.leaf_cont.empty()) {
        os << " gmm[" << node.gmm.components() << " components over";
        for (int v : node.leaf_cont) os << ' ' << net.var(v).name;
        os << ']';
      }
      os << '\n';
      return;
    }
    if (node.is_mixture()) {
      os << pad << "mixture\n";
    } else {
      os << pad << "split " << net.var(node.split_var).name << '\n';
    }
    for (std::size_t b = 0; b < node.children.size(); ++b) {
      os << pad << "  [" << b << "] p=" << node.edge_probs[b] << '\n';
      rec(node.children[b], indent + 2);
    }
  };
  if (!nodes.empty()) rec(root, 0);
  return os.str();
}

DensityTree dt_unit() {
  DensityTree t;
  t.nodes.emplace_back();  // bare leaf, evaluates to 1
  return t;
}

namespace {

struct LearnContext {
  const WeightedSampleSet& samples;
  const HybridNetwork& net;
  const DtConfig& cfg;
  DensityTree& tree;
  std::vector<int> disc_pos;   // positions of discrete vars within scope
  std::vector<int> cont_pos;   // positions of continuous vars within scope
  int leaf_counter = 0;
};

int build_leaf(LearnContext& ctx, const std::vector<std::size_t>& rows,
               const std::vector<char>& on_path) {
  const auto& s = ctx.samples;
  DtNode leaf;
  double total = 0.0;
  for (std::size_t r : rows) total += s.weights[r];
  const bool unweighted = !(total > 0.0);  // all-zero mass: fall back to counts

  for (int pos : ctx.disc_pos) {
    if (on_path[pos]) continue;
    const int var = s.scope[pos];
    const int card = ctx.net.var(var).cardinality;
    std::vector<double> pmf(card, ctx.cfg.pseudocount);
    for (std::size_t r : rows) {
      const int v = static_cast<int>(s.values[r * s.scope.size() + pos]);
      pmf[v] += unweighted ? 1.0 : s.weights[r];
    }
    double z = 0.0;
    for (double p : pmf) z += p;
    for (double& p : pmf) p /= z;
    leaf.leaf_disc.push_back(var);
    leaf.pmfs.push_back(std::move(pmf));
  }

  if (!ctx.cont_pos.empty()) {
    const int dims = static_cast<int>(ctx.cont_pos.size());
    std::vector<double> data(rows.size() * static_cast<std::size_t>(dims));
    std::vector<double> w(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int d = 0; d < dims; ++d) {
        data[i * dims + d] = s.values[rows[i] * s.scope.size() + ctx.cont_pos[d]];
      }
      w[i] = unweighted ? 1.0 : s.weights[rows[i]];
    }
    EmConfig em;
    em.components = ctx.cfg.components;
    em.lambda = ctx.cfg.lambda;
    em.max_iterations = ctx.cfg.em_max_iterations;
    em.tolerance = ctx.cfg.em_tolerance;
    em.seed = RandomStream(ctx.cfg.seed).derive(static_cast<std::uint64_t>(ctx.leaf_counter)).seed();
    leaf.gmm = fit_gmm(data, dims, w, em).model;
    for (int pos : ctx.cont_pos) leaf.leaf_cont.push_back(s.scope[pos]);
  }
  ++ctx.leaf_counter;

  const int idx = static_cast<int>(ctx.tree.nodes.size());
  ctx.tree.nodes.push_back(std::move(leaf));
  return idx;
}

int build_node(LearnContext& ctx, const std::vector<std::size_t>& rows,
               std::vector<char>& on_path) {
  const auto& s = ctx.samples;
  const auto& cfg = ctx.cfg;

  int best_pos = -1;
  std::vector<int> best_counts;
  if (rows.size() >= static_cast<std::size_t>(cfg.min_leaf_samples)) {
    // Split on the variable whose unweighted branch counts are most even.
    double best_score = std::numeric_limits<double>::infinity();
    for (int pos : ctx.disc_pos) {
      if (on_path[pos]) continue;
      const int card = ctx.net.var(s.scope[pos]).cardinality;
      std::vector<int> counts(card, 0);
      for (std::size_t r : rows) {
        ++counts[static_cast<int>(s.values[r * s.scope.size() + pos])];
      }
      const double mean = static_cast<double>(rows.size()) / card;
      double score = 0.0;
      for (int c : counts) {
        const double d = c - mean;
        score += d * d;
      }
      score /= card;
      if (score < best_score) {  // ties keep the lowest variable id
        best_score = score;
        best_pos = pos;
        best_counts = std::move(counts);
      }
    }
  }
  if (best_pos < 0 ||
      std::find(best_counts.begin(), best_counts.end(), 0) != best_counts.end()) {
    return build_leaf(ctx, rows, on_path);
  }

  const int card = static_cast<int>(best_counts.size());
  std::vector<std::vector<std::size_t>> branch_rows(card);
  std::vector<double> branch_weight(card, 0.0);
  for (int b = 0; b < card; ++b) branch_rows[b].reserve(best_counts[b]);
  double total = 0.0;
  for (std::size_t r : rows) {
    const int b = static_cast<int>(s.values[r * s.scope.size() + best_pos]);
    branch_rows[b].push_back(r);
    branch_weight[b] += s.weights[r];
    total += s.weights[r];
  }
  std::vector<double> probs(card);
  for (int b = 0; b < card; ++b) {
    probs[b] = total > 0.0
                   ? branch_weight[b] / total
                   : static_cast<double>(best_counts[b]) / static_cast<double>(rows.size());
  }
  floor_and_normalize(probs);

  DtNode node;
  node.split_var = s.scope[best_pos];
  node.edge_probs = std::move(probs);
  const int idx = static_cast<int>(ctx.tree.nodes.size());
  ctx.tree.nodes.push_back(std::move(node));

  on_path[best_pos] = 1;
  std::vector<int> children(card);
  for (int b = 0; b < card; ++b) children[b] = build_node(ctx, branch_rows[b], on_path);
  on_path[best_pos] = 0;
  ctx.tree.nodes[idx].children = std::move(children);
  return idx;
}

}  // namespace

DensityTree dt_learn(const WeightedSampleSet& samples, const HybridNetwork& net,
                     const DtConfig& cfg) {
  if (!std::is_sorted(samples.scope.begin(), samples.scope.end())) {
    throw std::invalid_argument("dt_learn: sample scope must be sorted");
  }
  DensityTree tree;
  tree.scope = samples.scope;
  tree.cards.reserve(tree.scope.size());
  for (int v : tree.scope) {
    tree.cards.push_back(net.var(v).is_discrete() ? net.var(v).cardinality : 0);
  }
  if (tree.scope.empty()) {
    tree.nodes.emplace_back();
    return tree;
  }
  if (samples.rows() == 0) {
    throw std::invalid_argument("dt_learn: no samples");
  }

  LearnContext ctx{samples, net, cfg, tree, {}, {}, 0};
  for (std::size_t i = 0; i < tree.scope.size(); ++i) {
    (tree.cards[i] > 0 ? ctx.disc_pos : ctx.cont_pos).push_back(static_cast<int>(i));
  }

  std::vector<std::size_t> all(samples.rows());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  std::vector<char> on_path(tree.scope.size(), 0);
  tree.root = build_node(ctx, all, on_path);
  return tree;
}

namespace {

int copy_marginalized(const DensityTree& src, int n, const std::vector<char>& keep_mask,
                      DensityTree& dst) {
  const DtNode& node = src.nodes[n];
  DtNode out;
  if (node.is_leaf()) {
    for (std::size_t i = 0; i < node.leaf_disc.size(); ++i) {
      if (!keep_mask[src.scope_pos(node.leaf_disc[i])]) continue;
      out.leaf_disc.push_back(node.leaf_disc[i]);
      out.pmfs.push_back(node.pmfs[i]);
    }
    std::vector<int> keep_dims;
    for (std::size_t i = 0; i < node.leaf_cont.size(); ++i) {
      if (keep_mask[src.scope_pos(node.leaf_cont[i])]) {
        keep_dims.push_back(static_cast<int>(i));
        out.leaf_cont.push_back(node.leaf_cont[i]);
      }
    }
    if (!keep_dims.empty()) out.gmm = node.gmm.marginal(keep_dims);
  } else {
    const bool drop_split =
        !node.is_mixture() && !keep_mask[src.scope_pos(node.split_var)];
    out.split_var = drop_split || node.is_mixture() ? DtNode::kMixture : node.split_var;
    out.edge_probs = node.edge_probs;
    for (int c : node.children) {
      out.children.push_back(copy_marginalized(src, c, keep_mask, dst));
    }
  }
  const int idx = static_cast<int>(dst.nodes.size());
  dst.nodes.push_back(std::move(out));
  return idx;
}

}  // namespace

DensityTree dt_marginalize(const DensityTree& t, std::span<const int> keep_vars) {
  std::vector<char> keep_mask(t.scope.size(), 0);
  DensityTree out;
  for (int v : keep_vars) {
    const int pos = t.scope_pos(v);
    if (pos < 0) throw std::invalid_argument("dt_marginalize: variable not in scope");
    keep_mask[pos] = 1;
  }
  for (std::size_t i = 0; i < t.scope.size(); ++i) {
    if (keep_mask[i]) {
      out.scope.push_back(t.scope[i]);
      out.cards.push_back(t.cards[i]);
    }
  }
  out.root = copy_marginalized(t, t.root, keep_mask, out);
  return out;
}

namespace {

// Mass of the subtree's density at the evidence slice (marginalizing
// everything unobserved).
double condition_mass(const DensityTree& t, int n, const Evidence& ev) {
  const DtNode& node = t.nodes[n];
  if (node.is_leaf()) {
    double mass = 1.0;
    std::vector<int> obs_dims;
    std::vector<double> obs_vals;
    for (std::size_t i = 0; i < node.leaf_disc.size(); ++i) {
      auto it = ev.values.find(node.leaf_disc[i]);
      if (it != ev.values.end()) mass *= node.pmfs[i][static_cast<int>(it->second)];
    }
    for (std::size_t i = 0; i < node.leaf_cont.size(); ++i) {
      auto it = ev.values.find(node.leaf_cont[i]);
      if (it != ev.values.end()) {
        obs_dims.push_back(static_cast<int>(i));
        obs_vals.push_back(it->second);
      }
    }
    if (!obs_dims.empty()) mass *= node.gmm.marginal(obs_dims).density(obs_vals);
    return mass;
  }
  if (!node.is_mixture()) {
    auto it = ev.values.find(node.split_var);
    if (it != ev.values.end()) {
      const int b = static_cast<int>(it->second);
      return node.edge_probs[b] * condition_mass(t, node.children[b], ev);
    }
  }
  double mass = 0.0;
  for (std::size_t b = 0; b < node.children.size(); ++b) {
    if (node.edge_probs[b] > 0.0) {
      mass += node.edge_probs[b] * condition_mass(t, node.children[b], ev);
    }
  }
  return mass;
}

int copy_conditioned(const DensityTree& src, int n, const Evidence& ev,
                     DensityTree& dst) {
  const DtNode& node = src.nodes[n];
  if (!node.is_leaf() && !node.is_mixture()) {
    auto it = ev.values.find(node.split_var);
    if (it != ev.values.end()) {
      // The observed branch replaces this node entirely.
      return copy_conditioned(src, node.children[static_cast<int>(it->second)], ev, dst);
    }
  }
  DtNode out;
  if (node.is_leaf()) {
    std::vector<int> keep_dims;
    std::vector<int> obs_dims;
    std::vector<double> obs_vals;
    for (std::size_t i = 0; i < node.leaf_disc.size(); ++i) {
      if (ev.values.count(node.leaf_disc[i])) continue;
      out.leaf_disc.push_back(node.leaf_disc[i]);
      out.pmfs.push_back(node.pmfs[i]);
    }
    for (std::size_t i = 0; i < node.leaf_cont.size(); ++i) {
      auto it = ev.values.find(node.leaf_cont[i]);
      if (it != ev.values.end()) {
        obs_dims.push_back(static_cast<int>(i));
        obs_vals.push_back(it->second);
      } else {
        keep_dims.push_back(static_cast<int>(i));
        out.leaf_cont.push_back(node.leaf_cont[i]);
      }
    }
    if (!out.leaf_cont.empty()) {
      out.gmm = node.gmm.marginal(keep_dims);
      if (!obs_dims.empty()) {
        // Reweight components by their density at the observed coordinates;
        // within a component the dimensions are independent, so means and
        // variances of the kept dimensions are untouched.
        const DiagonalGmm obs = node.gmm.marginal(obs_dims);
        double total = 0.0;
        for (int k = 0; k < out.gmm.components(); ++k) {
          double lk = std::log(std::max(obs.weights[k], 1e-300));
          for (std::size_t i = 0; i < obs_dims.size(); ++i) {
            const double v = obs.variances[static_cast<std::size_t>(k) * obs.dims + i];
            const double d = obs_vals[i] - obs.means[static_cast<std::size_t>(k) * obs.dims + i];
            lk += -0.5 * (std::log(2.0 * 3.14159265358979323846 * v) + d * d / v);
          }
          out.gmm.weights[k] = std::exp(lk);
          total += out.gmm.weights[k];
        }
        if (total > 0.0) {
          for (double& w : out.gmm.weights) w /= total;
        } else {
          const double u = 1.0 / out.gmm.components();
          for (double& w : out.gmm.weights) w = u;
        }
      }
    }
  } else {
    out.split_var = node.split_var;
    std::vector<double> masses(node.children.size());
    double total = 0.0;
    for (std::size_t b = 0; b < node.children.size(); ++b) {
      masses[b] = node.edge_probs[b] > 0.0
                      ? node.edge_probs[b] * condition_mass(src, node.children[b], ev)
                      : 0.0;
      total += masses[b];
    }
    for (std::size_t b = 0; b < node.children.size(); ++b) {
      if (total > 0.0 && masses[b] > 0.0) {
        out.edge_probs.push_back(masses[b] / total);
        out.children.push_back(copy_conditioned(src, node.children[b], ev, dst));
      } else {
        out.edge_probs.push_back(0.0);
        DtNode dead;  // unreachable bare leaf
        dst.nodes.push_back(std::move(dead));
        out.children.push_back(static_cast<int>(dst.nodes.size()) - 1);
      }
    }
  }
  const int idx = static_cast<int>(dst.nodes.size());
  dst.nodes.push_back(std::move(out));
  return idx;
}

}  // namespace

DtConditionResult dt_condition(const DensityTree& t, const Evidence& ev) {
  Evidence local;  // restricted to the scope
  for (int v : t.scope) {
    auto it = ev.values.find(v);
    if (it != ev.values.end()) local.values[v] = it->second;
  }
  DtConditionResult res;
  res.retained_mass = t.nodes.empty() ? 1.0 : condition_mass(t, t.root, local);
  if (!(res.retained_mass > 0.0)) {
    throw DegeneracyError("conditioning removed all mass from the density tree");
  }
  for (std::size_t i = 0; i < t.scope.size(); ++i) {
    if (!local.values.count(t.scope[i])) {
      res.tree.scope.push_back(t.scope[i]);
      res.tree.cards.push_back(t.cards[i]);
    }
  }
  res.tree.root = copy_conditioned(t, t.root, local, res.tree);
  return res;
}

std::vector<double> dt_discrete_marginal(const DensityTree& t, int var) {
  const int pos = t.scope_pos(var);
  if (pos < 0 || t.cards[pos] <= 0) {
    throw std::invalid_argument("dt_discrete_marginal: not a discrete scope variable");
  }
  const int keep[] = {var};
  const DensityTree m = dt_marginalize(t, keep);
  std::vector<double> pmf(t.cards[pos]);
  double x[1];
  double total = 0.0;
  for (int s = 0; s < t.cards[pos]; ++s) {
    x[0] = static_cast<double>(s);
    pmf[s] = m.eval(x);
    total += pmf[s];
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

std::vector<double> dt_continuous_histogram(const DensityTree& t, int var,
                                            double lower, double upper, int bins) {
  const int pos = t.scope_pos(var);
  if (pos < 0 || t.cards[pos] != 0) {
    throw std::invalid_argument("dt_continuous_histogram: not a continuous scope variable");
  }
  const int keep[] = {var};
  const DensityTree m = dt_marginalize(t, keep);
  std::vector<double> hist(bins, 0.0);
  const double width = (upper - lower) / bins;

  // The marginal tree has only mixture nodes above single-variable leaves.
  std::function<void(int, double)> rec = [&](int n, double w) {
    const DtNode& node = m.nodes[n];
    if (!node.is_leaf()) {
      for (std::size_t b = 0; b < node.children.size(); ++b) {
        if (node.edge_probs[b] > 0.0) rec(node.children[b], w * node.edge_probs[b]);
      }
      return;
    }
    for (int k = 0; k < node.gmm.components(); ++k) {
      const double mean = node.gmm.means[k];
      const double var_k = node.gmm.variances[k];
      const double wk = w * node.gmm.weights[k];
      // Tail mass folds into the boundary bins: the running cdf starts at 0
      // (minus infinity) and ends at 1 (plus infinity).
      double prev = 0.0;
      for (int b = 0; b < bins; ++b) {
        const double cur =
            b + 1 == bins ? 1.0 : gaussian_cdf(lower + width * (b + 1), mean, var_k);
        hist[b] += wk * (cur - prev);
        prev = cur;
      }
    }
  };
  rec(m.root, 1.0);

  double total = 0.0;
  for (double h : hist) total += h;
  if (total > 0.0) {
    for (double& h : hist) h /= total;
  }
  return hist;
}

}  // namespace hbn
