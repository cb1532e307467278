#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amle/config.hpp"
#include "amle/matrix.hpp"
#include "amle/model.hpp"

namespace amle {

/// Per-level outcome of one replicate. `statistic` is empty when the level
/// failed (non-identified, singular, non-converged, ...).
struct LevelOutcome {
  unsigned k = 0;
  std::optional<double> statistic;
  std::size_t rank = 0;
  Vector theta_bar;
  double dt = 0.0;
  std::string failure;
};

struct ReplicateOutcome {
  std::size_t index = 0;
  Vector theta_hat;  // empty when the fine path or its estimate failed
  std::vector<LevelOutcome> levels;
};

struct CoverageRow {
  unsigned k = 0;
  std::size_t n = 0;
  double coverage = 0.0;
  std::size_t used = 0;
  std::size_t failures = 0;
};

struct CoverageTable {
  std::vector<CoverageRow> rows;
  std::size_t replicates = 0;
  double p_tail = 0.0;
  std::string df_mode;
  std::vector<std::string> warnings;
};

/// Builds the model named in the config (T is forwarded as a model parameter).
ModelSetup make_setup(const ExperimentConfig& config);

/// Replicate m: simulate the fine path on stream m, estimate theta-hat on it,
/// then for every level k subsample, estimate theta-bar, and form the
/// normalized statistic from Sigma_n and D^2 l_n at theta-bar on the
/// subsampled grid. Numerical failures are recorded, never thrown.
ReplicateOutcome run_replicate(const ModelSetup& setup, const ExperimentConfig& config,
                               std::size_t m);

/// All M replicates, in replicate order, computed on config.threads workers.
/// The output does not depend on the number of workers.
std::vector<ReplicateOutcome> run_replicates(const ExperimentConfig& config);

CoverageTable tabulate(const ExperimentConfig& config,
                       const std::vector<ReplicateOutcome>& outcomes);

CoverageTable run_coverage_experiment(const ExperimentConfig& config);

/// "k,n,coverage,used,failures" with coverage to 4 decimals; warnings are
/// emitted first as '#' comment lines.
void write_coverage_csv(const CoverageTable& table, std::ostream& out);

}  // namespace amle
