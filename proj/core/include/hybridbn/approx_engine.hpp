#pragma once

#include <string>
#include <vector>

#include "hybridbn/clique_tree.hpp"
#include "hybridbn/density_tree.hpp"

namespace hbn {

struct ApproxConfig {
  int passes = 6;                      // total sweeps, including calibration
  std::size_t samples_per_clique = 1000;
  double early_stop_tv = 1e-3;         // max single-var TV between sweeps
  int histogram_bins = 100;            // continuous marginal resolution
  double defensive_mix = 0.2;          // ceiling on the share of proposal draws
                                       // taken from the broad forward-sample
                                       // tree, guarding the importance weights
                                       // against tail loss
  double defend_ess = 100.0;           // a sweep whose worst effective sample
                                       // size falls below this re-arms the full
                                       // defensive share; each healthy sweep
                                       // halves it instead
  int pool_blocks = 6;                 // draw blocks (of samples_per_clique
                                       // rows each) a clique's refinement pool
                                       // retains, oldest dropped first. Pool
                                       // rows are re-weighted against the
                                       // current target at every fit, so later
                                       // sweeps fit on more rows than they draw
  DtConfig dt;                          // density-tree / EM settings
  uint64_t seed = 0;
};

struct PassTrace {
  int pass = 0;
  double max_tv = 0.0;   // vs the previous sweep's marginals
  double min_ess = 0.0;  // worst effective sample size this sweep
};

/// All mutable state of the iterative propagation: one density tree per
/// clique (over its evidence-reduced scope) and one per directed edge.
struct ApproxState {
  const HybridNetwork* net = nullptr;
  CliqueTree tree;
  Evidence evidence;
  ApproxConfig config;

  std::vector<std::vector<int>> reduced_scope;   // per clique
  std::vector<std::vector<int>> reduced_sepset;  // per edge
  std::vector<std::vector<int>> uniform_vars;    // per clique: vars with no
                                                 // covering factor, carried
                                                 // as flat box densities

  std::vector<DensityTree> potentials;           // per clique
  std::vector<DensityTree> prior_proposals;      // per clique: fitted forward
                                                 // samples, the defensive part
                                                 // of every later proposal
  std::vector<DensityTree> messages;             // 2 per edge: [2e] = a->b
  std::vector<char> message_set;                 // parallel to messages

  // Per clique: rows drawn for its refinement so far (scope order, newest
  // last) and the proposal density each row was drawn under. Every fit
  // re-weights the whole pool against its current target, so the rows stay
  // usable after the messages around them have moved.
  std::vector<std::vector<double>> pool_values;
  std::vector<std::vector<double>> pool_q;

  int passes_done = 0;
  uint64_t task_counter = 0;  // stream split index; advances per fit
  double mix = 0.0;           // current defensive share; starts at
                              // config.defensive_mix and adapts per sweep
                              // based on the worst effective sample size
  std::vector<PassTrace> trace;
  std::vector<std::string> warnings;

  int message_index(int edge, int from_clique) const;

  /// Unnormalized refinement target for clique i at a reduced-scope point:
  /// product of incoming message densities (skipping `exclude_edge` when
  /// >= 0), ascribed CPD densities with evidence substituted, and flat box
  /// factors for otherwise uncovered variables. Zero outside variable ranges.
  double target_eval(int clique, int exclude_edge,
                     std::span<const double> x) const;
};

/// Builds the state and runs the calibration sweep (the first pass): fits a
/// forward-sample proposal per clique, then refines potentials and sends all
/// messages once in collect/distribute order. Throws DegeneracyError when a
/// calibration fit sees no positive weight.
ApproxState approx_init(const HybridNetwork& net, const Evidence& ev,
                        const ApproxConfig& cfg);

/// Runs refinement sweeps until `total_passes` have run overall or the
/// sweep-to-sweep marginal change falls below the early-stop threshold.
void approx_run(ApproxState& st, int total_passes);

/// Posterior marginal: pmf for discrete variables, a normalized
/// `config.histogram_bins` histogram for continuous ones. Evidence variables
/// yield a point mass.
std::vector<double> approx_marginal(const ApproxState& st, int var);

}  // namespace hbn
