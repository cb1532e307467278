#include "amle/asymptotics.hpp"

#include <cmath>
#include <string>

#include "amle/errors.hpp"

namespace amle {

Matrix grad_g(const ModelSpec& model, std::span<const double> x, std::span<const double> theta,
              std::size_t j) {
  if (j >= model.d) throw InputError("grad_g: parameter index out of range");
  require_state(model, x);
  if (model.grad_g) return model.grad_g(x, theta, j);

  const Vector th(theta.begin(), theta.end());
  auto g = [&](std::span<const double> y) { return sensitivity_g(model, y, th, j); };

  double h_rel = 1e-5;
  for (int attempt = 0; attempt < 2; ++attempt, h_rel *= 0.1) {
    bool inside = true;
    Vector probe(x.begin(), x.end());
    for (std::size_t q = 0; q < x.size() && inside; ++q) {
      const double h = h_rel * std::max(1.0, std::abs(x[q]));
      probe[q] = x[q] + h;
      inside = in_domain(model, probe);
      probe[q] = x[q] - h;
      inside = inside && in_domain(model, probe);
      probe[q] = x[q];
    }
    if (inside) return fd_jacobian(g, x, h_rel);
  }
  throw InputError("grad_g: finite-difference stencil leaves the state domain");
}

Matrix sigma_n(const ModelSpec& model, const Path& path, std::span<const double> theta) {
  model.validate();
  path.validate();
  require_theta(model, theta);
  const std::size_t k = model.k;
  const std::size_t d = model.d;
  Matrix sigma(d, d);
  std::vector<Matrix> a(d);
  for (std::size_t i = 0; i < path.n_steps(); ++i) {
    const auto x = path.state(i);
    const Matrix s = eval_diffusion_matrix(model, x);
    const Matrix nu = eval_diffusion(model, x);
    for (std::size_t j = 0; j < d; ++j) a[j] = grad_g(model, x, theta, j) * nu;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = j; l < d; ++l) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p)
          for (std::size_t r = 0; r < k; ++r) {
            if (s(p, r) == 0.0) continue;
            acc += s(p, r) * dot(a[j].row(r), a[l].row(p));
          }
        sigma(j, l) += acc;
        if (l != j) sigma(l, j) += acc;
      }
  }
  sigma *= 0.5 * path.grid.dt();
  return symmetrized(sigma);
}

AsymptoticReport mixed_normal_statistic(const Matrix& sigma, const Matrix& hessian,
                                        std::span<const double> theta_bar,
                                        std::span<const double> theta_hat, double dt,
                                        double rank_tol) {
  const std::size_t d = theta_bar.size();
  if (theta_hat.size() != d || sigma.rows() != d || sigma.cols() != d || hessian.rows() != d ||
      hessian.cols() != d)
    throw InputError("mixed_normal_statistic: inconsistent dimensions");
  if (!(dt > 0.0)) throw InputError("mixed_normal_statistic: dt must be positive");

  AsymptoticReport report;
  report.sigma_n = symmetrized(sigma);
  report.hessian = hessian;
  report.dt = dt;
  const PinvSqrt root = pinv_sqrt_with_rank(report.sigma_n, rank_tol);
  report.pinv_sqrt_sigma = root.root;
  report.rank = root.rank;

  Vector diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = theta_bar[i] - theta_hat[i];
  const Vector whitened = (1.0 / std::sqrt(dt)) * (root.root * (hessian * diff));
  report.statistic = dot(whitened, whitened);
  return report;
}

double coverage(std::span<const double> statistics, double p_tail, int df) {
  if (statistics.empty()) throw InputError("coverage: empty list of statistics");
  const double q = chi2_quantile(p_tail, df);
  std::size_t inside = 0;
  for (double s : statistics) {
    if (!(s >= 0.0)) throw InputError("coverage: statistics must be nonnegative");
    if (s <= q) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(statistics.size());
}

Vector sample_mixed_normal(const Matrix& c, NoiseSource& noise) {
  const Matrix root = psd_sqrt(c);
  const Vector z = standard_normals(noise, c.rows());
  return root * z;
}

}  // namespace amle
