#pragma once

#include <map>
#include <string>

#include "amle/matrix.hpp"
#include "amle/model.hpp"
#include "amle/simulator.hpp"

namespace amle {

/// Heston-type system with state (Y, X):
///   dY = (a - b Y) dt + sigma1 sqrt(Y) dW1
///   dX = (alpha - beta Y) dt + sigma2 sqrt(Y) (rho dW1 + sqrt(1 - rho^2) dW2)
/// Drift parameters are ordered (a, b, alpha, beta). sigma1, sigma2 and rho
/// are treated as known. a, b, alpha, beta, y0, x0 and T describe the data
/// generating process used for simulation.
struct HestonParams {
  double a = 2.0;
  double b = -0.8;
  double alpha = 0.02;
  double beta = 2.0;
  double sigma1 = 0.7;
  double sigma2 = 0.6;
  double rho = -0.8;
  double y0 = 0.5;
  double x0 = 4.605170185988092;  // ln 100
  double T = 1.0;

  /// a >= sigma1^2 / 2: the volatility factor stays positive.
  bool feller_ok() const noexcept { return a >= 0.5 * sigma1 * sigma1; }
  Vector theta() const { return {a, b, alpha, beta}; }
  Vector initial_state() const { return {y0, x0}; }
  void validate() const;
};

/// Lower clamp applied to Y after every Euler step.
inline constexpr double kHestonVarianceFloor = 1e-12;

/// Reads a, b, alpha, beta, sigma1, sigma2, rho, y0, x0, T; missing keys
/// keep their defaults.
HestonParams heston_params_from(const std::map<std::string, double>& values);

ModelSpec heston_model(const HestonParams& params);

/// Closed-form maximizer of the discretized log-likelihood on `path`.
/// Throws NonIdentifiedError when dt^2 sum(Y) sum(1/Y) - T^2 <= 0, which
/// happens exactly when Y is constant on the grid.
Vector heston_amle(const Path& path);

/// Closed-form Sigma_n; only the (a, alpha) block is nonzero.
Matrix heston_sigma_n(const Path& path, const HestonParams& params);

/// Closed-form Hessian of the discretized log-likelihood (theta-independent).
Matrix heston_hessian(const Path& path, const HestonParams& params);

/// Reference estimate: the same closed form evaluated on the finest grid.
Vector heston_mle_fine(const Path& fine_path);

}  // namespace amle
