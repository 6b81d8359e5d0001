#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>

#include "CLI11.hpp"
#include "hybridbn/approx_engine.hpp"
#include "hybridbn/csv.hpp"
#include "hybridbn/discretize.hpp"
#include "hybridbn/errors.hpp"
#include "hybridbn/exact_engine.hpp"
#include "hybridbn/experiment.hpp"
#include "hybridbn/metrics.hpp"
#include "hybridbn/network_io.hpp"
#include "hybridbn/sampler.hpp"

namespace hbn::cli {

namespace {

struct Options {
  std::string net_path;
  std::string evid_path;
  std::string out_path;
  std::string evid_out_path;
  std::vector<std::string> queries;

  int passes = 6;
  std::size_t samples = 1000;
  int bins = 100;
  int components = 10;
  int min_leaf = 25;
  double lambda = 10.0;
  double early_stop = 1e-3;
  uint64_t seed = 0;
  int clique = 0;
  bool trace = false;
  bool reference = false;

  std::string kind;
  std::vector<uint64_t> seeds;
  std::vector<double> parameters;
  bool quiet = false;
};

// Output stream selector: --out file or the session stdout.
struct Sink {
  std::ofstream file;
  std::ostream* os = nullptr;

  explicit Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os = &fallback;
      return;
    }
    file.open(path);
    if (!file) throw ParseError(path, "cannot open for writing");
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

ApproxConfig approx_config(const Options& o) {
  ApproxConfig cfg;
  cfg.passes = o.passes;
  cfg.samples_per_clique = o.samples;
  cfg.early_stop_tv = o.early_stop;
  cfg.histogram_bins = o.bins;
  cfg.seed = o.seed;
  cfg.dt.components = o.components;
  cfg.dt.lambda = o.lambda;
  cfg.dt.min_leaf_samples = o.min_leaf;
  return cfg;
}

Evidence load_optional_evidence(const HybridNetwork& net, const std::string& path) {
  if (path.empty()) return {};
  return load_evidence(net, path);
}

std::vector<int> resolve_queries(const HybridNetwork& net,
                                 const std::vector<std::string>& names,
                                 const Evidence& ev) {
  std::vector<int> out;
  if (names.empty()) {
    for (int v = 0; v < net.num_variables(); ++v) {
      if (!ev.contains(v)) out.push_back(v);
    }
    return out;
  }
  for (const auto& n : names) {
    auto id = net.find_variable(n);
    if (!id) throw std::invalid_argument("unknown variable '" + n + "'");
    out.push_back(*id);
  }
  return out;
}

// variable,value,probability rows; continuous values are bin midpoints, so
// they match the state names of the same network discretized at `bins`.
void write_marginal_csv(std::ostream& os, const HybridNetwork& net,
                        const std::vector<int>& queries, int bins,
                        const std::function<std::vector<double>(int)>& marginal) {
  os << "variable,value,probability\n";
  for (int q : queries) {
    const Variable& v = net.var(q);
    const std::vector<double> m = marginal(q);
    for (std::size_t i = 0; i < m.size(); ++i) {
      os << csv_field(v.name) << ',';
      if (v.is_discrete()) {
        os << csv_field(v.state_names[i]);
      } else {
        os << format_number(bin_midpoint(v.lower, v.upper, bins, static_cast<int>(i)));
      }
      os << ',' << format_number(m[i]) << '\n';
    }
  }
}

// Mean KL from exact marginals on the bin-discretized network to the
// estimates produced by `marginal` on the shared grid.
double reference_kl(const HybridNetwork& net, const Evidence& ev,
                    const std::vector<int>& queries, int bins,
                    const std::function<std::vector<double>(int)>& marginal) {
  HybridNetwork dnet = discretize_network(net, bins);
  Evidence dev = discretize_evidence(net, ev, bins);
  ExactResult res = exact_propagate(dnet, dev);
  double total = 0.0;
  for (int q : queries) {
    total += kl_divergence(exact_marginal(res, q), marginal(q));
  }
  return total / static_cast<double>(queries.size());
}

int cmd_validate(const Options& o, std::ostream& out) {
  HybridNetwork net = load_network(o.net_path, /*validate=*/false);
  auto rep = validate_network(net);
  if (!rep.ok()) {
    out << rep.to_string();
    return 1;
  }
  out << "network ok: " << net.num_variables() << " variables\n";
  if (!o.evid_path.empty()) {
    try {
      Evidence ev = load_evidence(net, o.evid_path);
      out << "evidence ok: " << ev.values.size() << " observations\n";
    } catch (const ParseError& e) {
      out << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}

int cmd_show_tree(const Options& o, std::ostream& out, std::ostream& err) {
  HybridNetwork net = load_network(o.net_path);
  CliqueTree tree = build_clique_tree(net);
  out << tree.to_string(net);
  for (const auto& w : tree.warnings) err << "warning: " << w << '\n';
  return 0;
}

int cmd_show_density(const Options& o, std::ostream& out, std::ostream& err) {
  HybridNetwork net = load_network(o.net_path);
  Evidence ev = load_optional_evidence(net, o.evid_path);
  ApproxState st = approx_init(net, ev, approx_config(o));
  approx_run(st, o.passes);
  if (o.clique < 0 || o.clique >= st.tree.num_cliques()) {
    throw std::invalid_argument("clique index out of range (tree has " +
                                std::to_string(st.tree.num_cliques()) + ")");
  }
  out << "clique " << o.clique << " potential over {";
  for (std::size_t i = 0; i < st.reduced_scope[o.clique].size(); ++i) {
    out << (i ? ", " : "") << net.var(st.reduced_scope[o.clique][i]).name;
  }
  out << "}\n" << st.potentials[o.clique].to_string(net);
  for (const auto& w : st.warnings) err << "warning: " << w << '\n';
  return 0;
}

int cmd_infer_exact(const Options& o, std::ostream& out, std::ostream& err) {
  HybridNetwork net = load_network(o.net_path);
  Evidence ev = load_optional_evidence(net, o.evid_path);
  ExactResult res = exact_propagate(net, ev);
  err << "log evidence: " << format_number(res.log_evidence) << '\n';
  Sink sink(o.out_path, out);
  write_marginal_csv(*sink, net, resolve_queries(net, o.queries, ev), o.bins,
                     [&](int q) { return exact_marginal(res, q); });
  return 0;
}

int cmd_infer_lw(const Options& o, std::ostream& out, std::ostream& err) {
  HybridNetwork net = load_network(o.net_path);
  Evidence ev = load_optional_evidence(net, o.evid_path);
  RandomStream rng(o.seed);
  WeightedSampleSet s = likelihood_weighting(net, ev, o.samples, rng);
  err << "effective sample size: " << format_number(s.effective_sample_size())
      << " of " << s.rows() << '\n';
  auto queries = resolve_queries(net, o.queries, ev);
  auto marginal = [&](int q) {
    const Variable& v = net.var(q);
    if (ev.contains(q)) {
      if (v.is_discrete()) {
        std::vector<double> pmf(v.cardinality, 0.0);
        pmf[static_cast<int>(ev.at(q))] = 1.0;
        return pmf;
      }
      std::vector<double> hist(o.bins, 0.0);
      hist[bin_index(v.lower, v.upper, o.bins, ev.at(q))] = 1.0;
      return hist;
    }
    if (v.is_discrete()) return weighted_discrete_marginal(s, q, v.cardinality);
    return weighted_continuous_histogram(s, q, v.lower, v.upper, o.bins);
  };
  if (o.reference) {
    err << "mean reference kl: " << format_number(reference_kl(net, ev, queries, o.bins, marginal))
        << '\n';
  }
  Sink sink(o.out_path, out);
  write_marginal_csv(*sink, net, queries, o.bins, marginal);
  return 0;
}

int cmd_infer_approx(const Options& o, std::ostream& out, std::ostream& err) {
  HybridNetwork net = load_network(o.net_path);
  Evidence ev = load_optional_evidence(net, o.evid_path);
  ApproxState st = approx_init(net, ev, approx_config(o));
  approx_run(st, o.passes);
  if (o.trace) {
    for (const auto& t : st.trace) {
      err << "pass " << t.pass << ": max_tv=" << format_number(t.max_tv)
          << " min_ess=" << format_number(t.min_ess) << '\n';
    }
    for (const auto& w : st.warnings) err << "warning: " << w << '\n';
  }
  auto queries = resolve_queries(net, o.queries, ev);
  auto marginal = [&](int q) { return approx_marginal(st, q); };
  if (o.reference) {
    err << "mean reference kl: " << format_number(reference_kl(net, ev, queries, o.bins, marginal))
        << '\n';
  }
  Sink sink(o.out_path, out);
  write_marginal_csv(*sink, net, queries, o.bins, marginal);
  return 0;
}

int cmd_discretize(const Options& o, std::ostream& out) {
  HybridNetwork net = load_network(o.net_path);
  HybridNetwork dnet = discretize_network(net, o.bins);
  Sink sink(o.out_path, out);
  *sink << network_to_json(dnet);
  if (!o.evid_path.empty()) {
    Evidence ev = load_evidence(net, o.evid_path);
    Evidence dev = discretize_evidence(net, ev, o.bins);
    if (o.evid_out_path.empty()) {
      throw CLI::ValidationError("--evidence needs --evidence-out here");
    }
    std::ofstream f(o.evid_out_path);
    if (!f) throw ParseError(o.evid_out_path, "cannot open for writing");
    f << evidence_to_json(dnet, dev);
  }
  return 0;
}

int cmd_experiment(const Options& o, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  spec.kind = experiment_kind_from_name(o.kind);
  spec.seeds = o.seeds;
  spec.parameters = o.parameters;
  spec.base = approx_config(o);
  auto rows = run_experiment(spec, o.quiet ? nullptr : &err);
  Sink sink(o.out_path, out);
  write_experiment_csv(*sink, rows);
  return 0;
}

void add_net_arg(CLI::App* sub, Options& o) {
  sub->add_option("network", o.net_path, "network file (.hbn)")->required();
}

void add_approx_opts(CLI::App* sub, Options& o) {
  sub->add_option("--passes", o.passes, "total propagation sweeps");
  sub->add_option("--samples", o.samples, "samples per refinement");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--bins", o.bins, "histogram bins for continuous marginals");
  sub->add_option("--lambda", o.lambda, "leaf Gaussian variance regularizer");
  sub->add_option("--components", o.components, "Gaussians per leaf");
  sub->add_option("--min-leaf", o.min_leaf, "minimum samples before splitting");
  sub->add_option("--early-stop", o.early_stop, "stop when marginals move less than this");
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hybrid Bayesian network inference"};
  app.require_subcommand(1);
  Options o;
  int code = 0;

  auto* validate = app.add_subcommand("validate", "check a network file");
  add_net_arg(validate, o);
  validate->add_option("--evidence", o.evid_path, "evidence file (.evid)");
  validate->callback([&] { code = cmd_validate(o, out); });

  auto* show_tree = app.add_subcommand("show-tree", "print the clique tree");
  add_net_arg(show_tree, o);
  show_tree->callback([&] { code = cmd_show_tree(o, out, err); });

  auto* show_density =
      app.add_subcommand("show-density", "print a fitted clique density tree");
  add_net_arg(show_density, o);
  show_density->add_option("--evidence", o.evid_path, "evidence file (.evid)");
  show_density->add_option("--clique", o.clique, "clique index (see show-tree)");
  add_approx_opts(show_density, o);
  show_density->callback([&] { code = cmd_show_density(o, out, err); });

  auto* infer_exact =
      app.add_subcommand("infer-exact", "exact marginals (discrete networks)");
  add_net_arg(infer_exact, o);
  infer_exact->add_option("--evidence", o.evid_path, "evidence file (.evid)");
  infer_exact->add_option("--query,-q", o.queries, "variables to report (default: all unobserved)");
  infer_exact->add_option("--out", o.out_path, "write the CSV here instead of stdout");
  infer_exact->add_option("--bins", o.bins, "histogram bins for continuous marginals");
  infer_exact->callback([&] { code = cmd_infer_exact(o, out, err); });

  auto* infer_lw =
      app.add_subcommand("infer-lw", "likelihood-weighting marginals");
  add_net_arg(infer_lw, o);
  infer_lw->add_option("--evidence", o.evid_path, "evidence file (.evid)");
  infer_lw->add_option("--query,-q", o.queries, "variables to report");
  infer_lw->add_option("--out", o.out_path, "write the CSV here instead of stdout");
  infer_lw->add_option("--samples", o.samples, "number of weighted samples");
  infer_lw->add_option("--seed", o.seed, "random seed");
  infer_lw->add_option("--bins", o.bins, "histogram bins for continuous marginals");
  infer_lw->add_flag("--reference", o.reference,
                     "also print mean KL from the discretized exact answer");
  infer_lw->callback([&] { code = cmd_infer_lw(o, out, err); });

  auto* infer_approx =
      app.add_subcommand("infer-approx", "iterative density-tree marginals");
  add_net_arg(infer_approx, o);
  infer_approx->add_option("--evidence", o.evid_path, "evidence file (.evid)");
  infer_approx->add_option("--query,-q", o.queries, "variables to report");
  infer_approx->add_option("--out", o.out_path, "write the CSV here instead of stdout");
  add_approx_opts(infer_approx, o);
  infer_approx->add_flag("--trace", o.trace, "print per-pass convergence to stderr");
  infer_approx->add_flag("--reference", o.reference,
                         "also print mean KL from the discretized exact answer");
  infer_approx->callback([&] { code = cmd_infer_approx(o, out, err); });

  auto* discretize =
      app.add_subcommand("discretize", "replace continuous variables with bins");
  add_net_arg(discretize, o);
  discretize->add_option("--bins", o.bins, "bins per continuous variable");
  discretize->add_option("--out", o.out_path, "write the network here instead of stdout");
  discretize->add_option("--evidence", o.evid_path, "evidence file to convert too");
  discretize->add_option("--evidence-out", o.evid_out_path, "where the converted evidence goes");
  discretize->callback([&] { code = cmd_discretize(o, out); });

  auto* experiment =
      app.add_subcommand("experiment", "run a built-in evaluation sweep");
  experiment->add_option("--kind", o.kind,
                         "iterations | samples | lambda | lw-comparison")
      ->required();
  experiment->add_option("--out", o.out_path, "write the CSV here instead of stdout");
  experiment->add_option("--seeds", o.seeds, "seeds to average over");
  experiment->add_option("--parameters", o.parameters, "swept parameter values");
  experiment->add_flag("--quiet", o.quiet, "suppress progress lines");
  add_approx_opts(experiment, o);
  experiment->callback([&] { code = cmd_experiment(o, out, err); });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DegeneracyError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return code;
}

}  // namespace hbn::cli
