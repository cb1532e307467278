#pragma once

#include <string_view>

#include "amle/likelihood.hpp"
#include "amle/matrix.hpp"
#include "amle/model.hpp"
#include "amle/simulator.hpp"

namespace amle {

enum class EstimateMethod { ClosedFormLinear, Newton };

std::string_view to_string(EstimateMethod method);

struct EstimateResult {
  Vector theta;
  /// ||D l_n||_inf at theta.
  double grad_norm = 0.0;
  double hessian_max_eigenvalue = 0.0;
  bool converged = false;
  bool on_boundary = false;
  int iterations = 0;
  EstimateMethod method = EstimateMethod::ClosedFormLinear;
};

struct NewtonOptions {
  /// Stationarity tolerance, scaled by 1 + |l_n(theta)|.
  double tol = 1e-10;
  int max_iter = 100;
  /// Halvings tried per iteration before giving up on progress.
  int max_halvings = 60;
};

/// Gradient tolerance used to judge a closed-form solution stationary: the
/// rounding floor of the sums that make up the gradient.
double stationarity_tolerance(const LikelihoodContext& ctx, std::span<const double> theta,
                              double tol = 1e-10);

/// Maximizer of l_n for drift affine in theta, mu = B(x) theta + c(x), from
/// the normal equations. Throws InputError if the model does not declare an
/// affine drift and NonIdentifiedError when the Hessian is not negative
/// definite (e.g. a path along which the regressors are collinear).
EstimateResult amle_linear(const ModelSpec& model, const Path& path);

/// Projected damped Newton ascent on l_n inside the model's parameter box.
/// Never throws on non-convergence: the result carries converged = false.
/// A terminus on the box boundary, or with an indefinite Hessian, is reported
/// as not converged.
EstimateResult amle_newton(const ModelSpec& model, const Path& path, std::span<const double> init,
                           const NewtonOptions& options = {});

/// Estimator dispatch: closed form for affine drift, otherwise Newton from
/// the box center.
EstimateResult estimate_amle(const ModelSpec& model, const Path& path);

/// Reference estimate theta-hat: the AMLE evaluated on the full-resolution
/// path.
EstimateResult mle_proxy(const ModelSpec& model, const Path& fine_path);

}  // namespace amle
