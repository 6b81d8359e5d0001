#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybridbn/approx_engine.hpp"

namespace hbn {

enum class ExperimentKind { Iterations, Samples, Lambda, LwComparison };

ExperimentKind experiment_kind_from_name(const std::string& name);
std::string experiment_kind_name(ExperimentKind k);

struct ExperimentRow {
  std::string experiment;  // kind name, plus a variant suffix where needed
  double parameter = 0.0;  // passes / sample count / lambda / evidence count
  uint64_t seed = 0;
  double kl_error = 0.0;   // mean KL(reference || estimate) over query vars
  double seconds = 0.0;    // inference wall-clock
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Iterations;
  std::vector<uint64_t> seeds;      // empty -> per-kind default
  std::vector<double> parameters;   // empty -> per-kind default sweep
  ApproxConfig base;                // settings not swept by the kind
};

/// Runs one experiment sweep on the built-in scenario networks. Reference
/// marginals come from exact propagation on the bin-discretized network, so
/// estimates and references share one grid. Progress lines go to `log` when
/// given. Apart from the seconds column, output is a pure function of the
/// spec (the lw-comparison kind excepted: its sampling budget is matched to
/// measured wall-clock).
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          std::ostream* log = nullptr);

void write_experiment_csv(std::ostream& os,
                          const std::vector<ExperimentRow>& rows);

}  // namespace hbn
