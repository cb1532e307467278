#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amle {

/// Settings of one coverage experiment.
///
/// File format: UTF-8 "key = value" lines, '#' starts a comment, lists are
/// comma-separated. Recognized keys are the field names below (k_list,
/// p_tail, M, master_seed, df_mode, output, threads, sanity_row, model, T, l);
/// every other key is a numeric model parameter (e.g. a, sigma1, y0).
struct ExperimentConfig {
  std::string model = "heston";
  std::map<std::string, double> model_params;
  double T = 1.0;
  unsigned l = 12;
  std::vector<unsigned> k_list;
  double p_tail = 0.05;
  std::size_t M = 1000;
  std::uint64_t master_seed = 20240611;
  /// nullopt: degrees of freedom = numerical rank of Sigma_n per replicate.
  std::optional<int> fixed_df;
  std::string output;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Append the degenerate k = l row (statistic identically 0).
  bool sanity_row = false;

  /// Throws InputError unless 1 <= k <= l for all k, M >= 1, 0 < p_tail < 1.
  void validate() const;
  /// "auto-rank" or "fixed:r".
  std::string df_mode() const;
  /// k_list plus l when sanity_row is set.
  std::vector<unsigned> levels() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& file);

/// "auto-rank" | "fixed:r"; throws InputError otherwise.
std::optional<int> parse_df_mode(const std::string& text);

/// Comma-separated unsigned integers; "a..b" expands to an inclusive range.
std::vector<unsigned> parse_level_list(const std::string& text);

}  // namespace amle
