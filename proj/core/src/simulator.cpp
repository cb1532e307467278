#include "amle/simulator.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "amle/errors.hpp"

namespace amle {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps), dt_(0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InputError("time grid: horizon must be positive and finite");
  if (n_steps == 0) throw InputError("time grid: need at least one step");
  dt_ = horizon / static_cast<double>(n_steps);
}

void Path::validate() const {
  if (states.rows() != grid.n_steps() + 1)
    throw InputError("path: " + std::to_string(states.rows()) + " rows for " +
                     std::to_string(grid.n_steps()) + " steps");
  if (states.cols() == 0) throw InputError("path: zero-dimensional state");
}

Path euler_simulate(const ModelSpec& model, std::span<const double> theta,
                    std::span<const double> x0, const TimeGrid& grid, NoiseSource noise) {
  model.validate();
  require_state(model, x0);
  require_theta(model, theta);
  if (!model.domain.contains(theta))
    throw InputError("euler_simulate: parameter vector outside the model's domain box");

  const std::size_t k = model.k;
  const std::size_t n = grid.n_steps();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  Path path{grid, Matrix(n + 1, k)};
  std::copy(x0.begin(), x0.end(), path.states.row(0).begin());

  Vector dw(k);
  Vector next(k);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto prev = path.states.row(i - 1);
    const Vector mu = model.drift(prev, theta);
    const Matrix nu = model.diffusion(prev);
    for (std::size_t c = 0; c < k; ++c) dw[c] = sqrt_dt * noise.normal();
    for (std::size_t r = 0; r < k; ++r) next[r] = prev[r] + mu[r] * dt + dot(nu.row(r), dw);
    const Vector guarded = guard_state(model, next);
    if (!all_finite(guarded))
      throw SimulationDivergedError("simulation diverged at step " + std::to_string(i), i);
    std::copy(guarded.begin(), guarded.end(), path.states.row(i).begin());
  }
  return path;
}

unsigned log2_exact(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n))
    throw InputError("step count " + std::to_string(n) + " is not a power of two");
  return static_cast<unsigned>(std::countr_zero(n));
}

Path subsample(const Path& path, unsigned level) {
  path.validate();
  const unsigned l = log2_exact(path.n_steps());
  if (level > l)
    throw InputError("subsample level " + std::to_string(level) + " exceeds path level " +
                     std::to_string(l));
  const std::size_t stride = std::size_t{1} << (l - level);
  const std::size_t n = std::size_t{1} << level;
  Path out{TimeGrid(path.grid.horizon(), n), Matrix(n + 1, path.dim())};
  for (std::size_t i = 0; i <= n; ++i) {
    const auto src = path.states.row(i * stride);
    std::copy(src.begin(), src.end(), out.states.row(i).begin());
  }
  return out;
}

}  // namespace amle
