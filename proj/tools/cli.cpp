#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "amle/asymptotics.hpp"
#include "amle/config.hpp"
#include "amle/errors.hpp"
#include "amle/estimator.hpp"
#include "amle/experiment.hpp"
#include "amle/numerics.hpp"
#include "amle/simulator.hpp"

namespace amle::cli {

namespace {

std::string format_real(double v, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

struct Options {
  std::string config;
  std::string model;
  std::string path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> p;
  std::optional<int> df;
  std::optional<unsigned> l;
  std::string k;
  std::optional<std::size_t> m;
};

ExperimentConfig base_config(const Options& opt) {
  ExperimentConfig cfg = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
  if (!opt.model.empty()) cfg.model = opt.model;
  if (opt.l) cfg.l = *opt.l;
  if (!opt.k.empty()) cfg.k_list = parse_level_list(opt.k);
  if (opt.m) cfg.M = *opt.m;
  if (opt.p) cfg.p_tail = *opt.p;
  if (opt.df) {
    if (*opt.df <= 0) throw InputError("--df must be positive");
    cfg.fixed_df = *opt.df;
  }
  if (opt.seed) cfg.master_seed = *opt.seed;
  if (!opt.out.empty()) cfg.output = opt.out;
  return cfg;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const ExperimentConfig cfg = base_config(opt);
  const ModelSetup setup = make_setup(cfg);
  const TimeGrid grid(cfg.T, std::size_t{1} << cfg.l);
  const Path path = euler_simulate(setup.model, setup.true_theta, setup.initial_state, grid,
                                   NoiseSource(cfg.master_seed, 0));
  if (cfg.output.empty())
    write_path(path, out);
  else
    write_path(path, std::filesystem::path(cfg.output));
  return kOk;
}

int cmd_estimate(const Options& opt, std::ostream& out) {
  const ExperimentConfig cfg = base_config(opt);
  const ModelSetup setup = make_setup(cfg);
  const Path path = read_path(std::filesystem::path(opt.path));
  const EstimateResult est = estimate_amle(setup.model, path);
  for (std::size_t j = 0; j < est.theta.size(); ++j) {
    const std::string name =
        j < setup.model.param_names.size() ? setup.model.param_names[j] : "theta" + std::to_string(j + 1);
    out << name << '=' << format_real(est.theta[j]) << '\n';
  }
  out << "grad_norm=" << format_real(est.grad_norm) << '\n';
  out << "neg_definite=" << (est.hessian_max_eigenvalue < 0.0 ? "true" : "false") << '\n';
  out << "hessian_max_eigenvalue=" << format_real(est.hessian_max_eigenvalue) << '\n';
  out << "converged=" << (est.converged ? "true" : "false") << '\n';
  out << "method=" << to_string(est.method) << '\n';
  return est.converged ? kOk : kNumericalError;
}

int cmd_coverage(const Options& opt, std::ostream& out) {
  const ExperimentConfig cfg = base_config(opt);
  const CoverageTable table = run_coverage_experiment(cfg);
  if (cfg.output.empty()) {
    write_coverage_csv(table, out);
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) throw InputError("cannot open '" + cfg.output + "' for writing");
    write_coverage_csv(table, file);
  }
  return kOk;
}

int cmd_chi2(const Options& opt, std::ostream& out) {
  out << format_real(chi2_quantile(*opt.p, *opt.df), "%.6f") << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate maximum likelihood estimation for discretely observed diffusions",
               argv.empty() ? "amle" : argv.front()};
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "Simulate an Euler path and write it as CSV");
  simulate->add_option("--config", opt.config, "Config file with model parameters")
      ->check(CLI::ExistingFile);
  simulate->add_option("--model", opt.model, "Registered model name (heston, ou)");
  simulate->add_option("--l", opt.l, "Grid exponent: n = 2^l steps");
  simulate->add_option("--seed", opt.seed, "Master seed (stream 0 is used)");
  simulate->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* estimate = app.add_subcommand("estimate", "Estimate drift parameters from a path CSV");
  estimate->add_option("--config", opt.config, "Config file with model parameters")
      ->check(CLI::ExistingFile);
  estimate->add_option("--model", opt.model, "Registered model name (heston, ou)");
  estimate->add_option("--path", opt.path, "Path CSV")->required();

  auto* coverage_cmd = app.add_subcommand("coverage", "Run the Monte Carlo coverage experiment");
  coverage_cmd->add_option("--config", opt.config, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  coverage_cmd->add_option("--l", opt.l, "Fine grid exponent");
  coverage_cmd->add_option("--k", opt.k, "Subsample levels, e.g. 3,4,5 or 3..8");
  coverage_cmd->add_option("--m", opt.m, "Number of replicates");
  coverage_cmd->add_option("--p", opt.p, "Tail probability");
  coverage_cmd->add_option("--df", opt.df, "Fixed degrees of freedom");
  coverage_cmd->add_option("--seed", opt.seed, "Master seed");
  coverage_cmd->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* chi2 = app.add_subcommand("chi2", "Print the upper-tail chi-square quantile");
  chi2->add_option("--p", opt.p, "Tail probability")->required();
  chi2->add_option("--df", opt.df, "Degrees of freedom")->required();

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kInputError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (estimate->parsed()) return cmd_estimate(opt, out);
    if (coverage_cmd->parsed()) return cmd_coverage(opt, out);
    if (chi2->parsed()) return cmd_chi2(opt, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  err << app.help();
  return kInputError;
}

}  // namespace amle::cli
