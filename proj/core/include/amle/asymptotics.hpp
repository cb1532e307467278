#pragma once

#include <vector>

#include "amle/matrix.hpp"
#include "amle/model.hpp"
#include "amle/numerics.hpp"
#include "amle/random.hpp"
#include "amle/simulator.hpp"

namespace amle {

/// State Jacobian of the sensitivity function g_j, entry (p, q) = d g_j,p / d x_q.
/// Uses the model's analytic callback when present, otherwise central
/// differences of sensitivity_g with h_rel = 1e-5; if the stencil leaves the
/// state domain the step is shrunk once by 10x before giving up with
/// InputError.
Matrix grad_g(const ModelSpec& model, std::span<const double> x, std::span<const double> theta,
              std::size_t j);

/// Riemann-sum covariance along the path:
///   Sigma_n(j, l) = dt/2 * sum_i sum_{p,r} S_pr(X_{i-1}) <row_r(A_j) | row_p(A_l)>,
/// A_j = grad_g_j(X_{i-1}) nu(X_{i-1}); returned symmetrized.
Matrix sigma_n(const ModelSpec& model, const Path& path, std::span<const double> theta);

struct AsymptoticReport {
  Matrix sigma_n;
  Matrix hessian;
  std::size_t rank = 0;
  Matrix pinv_sqrt_sigma;
  /// || dt^{-1/2} Sigma_n^{+1/2} H (theta_bar - theta_hat) ||_2^2
  double statistic = 0.0;
  double dt = 0.0;
};

AsymptoticReport mixed_normal_statistic(const Matrix& sigma, const Matrix& hessian,
                                        std::span<const double> theta_bar,
                                        std::span<const double> theta_hat, double dt,
                                        double rank_tol = kDefaultRankTol);

/// Fraction of statistics <= chi2_quantile(p_tail, df).
double coverage(std::span<const double> statistics, double p_tail, int df);

/// sqrt(C) Z with sqrt(C) the symmetric PSD root and Z standard normal.
Vector sample_mixed_normal(const Matrix& c, NoiseSource& noise);

}  // namespace amle
