#include "amle/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

#include "amle/asymptotics.hpp"
#include "amle/errors.hpp"
#include "amle/estimator.hpp"
#include "amle/likelihood.hpp"
#include "amle/numerics.hpp"
#include "amle/random.hpp"
#include "amle/simulator.hpp"

namespace amle {

ModelSetup make_setup(const ExperimentConfig& config) {
  auto params = config.model_params;
  params["T"] = config.T;
  return ModelRegistry::instance().make(config.model, params);
}

namespace {

LevelOutcome evaluate_level(const ModelSpec& model, const Path& fine, const Vector& theta_hat,
                            unsigned k) {
  LevelOutcome out;
  out.k = k;
  try {
    const Path coarse = subsample(fine, k);
    out.dt = coarse.grid.dt();
    const EstimateResult est = estimate_amle(model, coarse);
    out.theta_bar = est.theta;
    if (!est.converged) {
      out.failure = "estimator did not converge";
      return out;
    }
    const Matrix sigma = sigma_n(model, coarse, est.theta);
    const Matrix hessian = hess_loglik_n(model, coarse, est.theta);
    const AsymptoticReport report =
        mixed_normal_statistic(sigma, hessian, est.theta, theta_hat, out.dt);
    if (!std::isfinite(report.statistic)) {
      out.failure = "non-finite statistic";
      return out;
    }
    out.statistic = report.statistic;
    out.rank = report.rank;
  } catch (const NumericalError& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

ReplicateOutcome run_replicate(const ModelSetup& setup, const ExperimentConfig& config,
                               std::size_t m) {
  ReplicateOutcome out;
  out.index = m;
  const auto levels = config.levels();
  std::string fine_failure;
  std::optional<Path> fine;
  try {
    const TimeGrid grid(config.T, std::size_t{1} << config.l);
    fine = euler_simulate(setup.model, setup.true_theta, setup.initial_state, grid,
                          NoiseSource(config.master_seed, m));
    const EstimateResult reference = mle_proxy(setup.model, *fine);
    if (reference.converged)
      out.theta_hat = reference.theta;
    else
      fine_failure = "fine-grid estimator did not converge";
  } catch (const NumericalError& e) {
    fine_failure = e.what();
  }

  for (unsigned k : levels) {
    if (out.theta_hat.empty()) {
      LevelOutcome failed;
      failed.k = k;
      failed.failure = fine_failure;
      out.levels.push_back(std::move(failed));
    } else {
      out.levels.push_back(evaluate_level(setup.model, *fine, out.theta_hat, k));
    }
  }
  return out;
}

std::vector<ReplicateOutcome> run_replicates(const ExperimentConfig& config) {
  config.validate();
  const ModelSetup setup = make_setup(config);
  setup.model.validate();

  std::vector<ReplicateOutcome> outcomes(config.M);
  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(config.M));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t m = next++; m < config.M && !failed; m = next++) {
      try {
        outcomes[m] = run_replicate(setup, config, m);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return outcomes;
}

CoverageTable tabulate(const ExperimentConfig& config,
                       const std::vector<ReplicateOutcome>& outcomes) {
  CoverageTable table;
  table.replicates = outcomes.size();
  table.p_tail = config.p_tail;
  table.df_mode = config.df_mode();

  std::map<int, double> quantiles;
  auto quantile = [&](int df) {
    auto it = quantiles.find(df);
    if (it == quantiles.end()) it = quantiles.emplace(df, chi2_quantile(config.p_tail, df)).first;
    return it->second;
  };

  const auto levels = config.levels();
  for (std::size_t li = 0; li < levels.size(); ++li) {
    CoverageRow row;
    row.k = levels[li];
    row.n = std::size_t{1} << row.k;
    std::size_t inside = 0;
    for (const auto& rep : outcomes) {
      const LevelOutcome& lvl = rep.levels.at(li);
      if (!lvl.statistic) {
        ++row.failures;
        continue;
      }
      // A zero-rank Sigma_n whitens everything to 0; count it as inside.
      const int df = config.fixed_df ? *config.fixed_df : static_cast<int>(lvl.rank);
      ++row.used;
      if (df == 0 ? *lvl.statistic == 0.0 : *lvl.statistic <= quantile(df)) ++inside;
    }
    row.coverage = row.used ? static_cast<double>(inside) / static_cast<double>(row.used) : 0.0;
    if (table.replicates > 0 && row.failures * 20 > table.replicates) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "k=%u: %zu of %zu replicates failed (%.1f%% > 5%%)", row.k,
                    row.failures, table.replicates,
                    100.0 * static_cast<double>(row.failures) / static_cast<double>(table.replicates));
      table.warnings.emplace_back(buf);
    }
    table.rows.push_back(row);
  }
  return table;
}

CoverageTable run_coverage_experiment(const ExperimentConfig& config) {
  return tabulate(config, run_replicates(config));
}

void write_coverage_csv(const CoverageTable& table, std::ostream& out) {
  for (const auto& w : table.warnings) out << "# warning: " << w << '\n';
  out << "k,n,coverage,used,failures\n";
  for (const auto& row : table.rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", row.coverage);
    out << row.k << ',' << row.n << ',' << buf << ',' << row.used << ',' << row.failures << '\n';
  }
}

}  // namespace amle
