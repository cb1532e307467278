#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "amle/matrix.hpp"
#include "amle/model.hpp"
#include "amle/random.hpp"

namespace amle {

/// Equidistant grid t_i = i * dt on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t n_steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return dt_; }
  /// t_i, with t_n returned as exactly T.
  double time(std::size_t i) const noexcept {
    return i == n_steps_ ? horizon_ : static_cast<double>(i) * dt_;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t n_steps_;
  double dt_;
};

/// Discrete observation (X_{t_0}, ..., X_{t_n}); row i of `states` is X_{t_i}.
struct Path {
  TimeGrid grid;
  Matrix states;

  std::size_t n_steps() const noexcept { return grid.n_steps(); }
  std::size_t dim() const noexcept { return states.cols(); }
  std::span<const double> state(std::size_t i) const { return states.row(i); }
  /// Throws InputError unless states has n_steps + 1 rows.
  void validate() const;

  friend bool operator==(const Path&, const Path&) = default;
};

/// Euler-Maruyama:
///   X_i = guard(X_{i-1} + mu(X_{i-1}, theta) dt + nu(X_{i-1}) sqrt(dt) Z_i),
/// Z_i drawn from `noise` as k normals per step in component order.
/// Throws SimulationDivergedError (with the step index) on non-finite states.
Path euler_simulate(const ModelSpec& model, std::span<const double> theta,
                    std::span<const double> x0, const TimeGrid& grid, NoiseSource noise);

/// Rows i * 2^(l - level) for i = 0..2^level of a path with n = 2^l steps.
Path subsample(const Path& path, unsigned level);

/// log2(n) if n is a power of two, otherwise throws InputError.
unsigned log2_exact(std::size_t n);

/// CSV: header "t,x1,...,xk", one row per grid point, 17 significant digits.
void write_path(const Path& path, std::ostream& out);
void write_path(const Path& path, const std::filesystem::path& destination);
Path read_path(std::istream& in);
Path read_path(const std::filesystem::path& source);

}  // namespace amle
