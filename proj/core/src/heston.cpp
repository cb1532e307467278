#include "amle/heston.hpp"

#include <cmath>
#include <string>

#include "amle/errors.hpp"
#include "amle/numerics.hpp"

namespace amle {

namespace {

// Bounds of the parameter box; wide enough that coarse-grid estimates never
// touch it.
constexpr double kHestonBox = 1e6;

double lookup(const std::map<std::string, double>& values, const char* key, double fallback) {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

struct GridSums {
  double dt = 0.0;
  double horizon = 0.0;
  double sum_y = 0.0;       // sum Y_{i-1}
  double sum_inv_y = 0.0;   // sum 1 / Y_{i-1}
  double sum_inv_y2 = 0.0;  // sum 1 / Y_{i-1}^2
  double sum_dy_y = 0.0;    // sum (Y_i - Y_{i-1}) / Y_{i-1}
  double sum_dx_y = 0.0;    // sum (X_i - X_{i-1}) / Y_{i-1}
  double y_change = 0.0;    // Y_n - Y_0
  double x_change = 0.0;    // X_n - X_0
};

GridSums grid_sums(const Path& path) {
  path.validate();
  if (path.dim() != 2) throw InputError("Heston path must have two state columns (Y, X)");
  GridSums s;
  s.dt = path.grid.dt();
  s.horizon = path.grid.horizon();
  const std::size_t n = path.n_steps();
  for (std::size_t i = 0; i < n; ++i) {
    const double y = path.states(i, 0);
    if (!(y > 0.0))
      throw InputError("Heston path: Y is not positive at grid index " + std::to_string(i));
    s.sum_y += y;
    s.sum_inv_y += 1.0 / y;
    s.sum_inv_y2 += 1.0 / (y * y);
    s.sum_dy_y += (path.states(i + 1, 0) - y) / y;
    s.sum_dx_y += (path.states(i + 1, 1) - path.states(i, 1)) / y;
  }
  s.y_change = path.states(n, 0) - path.states(0, 0);
  s.x_change = path.states(n, 1) - path.states(0, 1);
  return s;
}

}  // namespace

void HestonParams::validate() const {
  const double all[] = {a, b, alpha, beta, sigma1, sigma2, rho, y0, x0, T};
  for (double v : all)
    if (!std::isfinite(v)) throw InputError("Heston parameters must be finite");
  if (!(sigma1 > 0.0)) throw InputError("Heston: sigma1 must be positive");
  if (!(sigma2 > 0.0)) throw InputError("Heston: sigma2 must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw InputError("Heston: rho must lie in (-1, 1)");
  if (!(y0 > 0.0)) throw InputError("Heston: y0 must be positive");
  if (!(T > 0.0)) throw InputError("Heston: T must be positive");
}

HestonParams heston_params_from(const std::map<std::string, double>& values) {
  HestonParams p;
  p.a = lookup(values, "a", p.a);
  p.b = lookup(values, "b", p.b);
  p.alpha = lookup(values, "alpha", p.alpha);
  p.beta = lookup(values, "beta", p.beta);
  p.sigma1 = lookup(values, "sigma1", p.sigma1);
  p.sigma2 = lookup(values, "sigma2", p.sigma2);
  p.rho = lookup(values, "rho", p.rho);
  p.y0 = lookup(values, "y0", p.y0);
  p.x0 = lookup(values, "x0", p.x0);
  p.T = lookup(values, "T", p.T);
  p.validate();
  return p;
}

ModelSpec heston_model(const HestonParams& params) {
  params.validate();
  const double s1 = params.sigma1;
  const double s2 = params.sigma2;
  const double rho = params.rho;
  const double rho_c = std::sqrt(1.0 - rho * rho);
  // Inverse of the correlation factor C = [[s1^2, s1 s2 rho], [s1 s2 rho, s2^2]],
  // so that S(Y)^{-1} = C^{-1} / Y.
  const double g = 1.0 / (s1 * s1 * s2 * s2 * (1.0 - rho * rho));
  const Matrix c_inv{{g * s2 * s2, -g * s1 * s2 * rho}, {-g * s1 * s2 * rho, g * s1 * s1}};

  ModelSpec m;
  m.name = "heston";
  m.k = 2;
  m.d = 4;
  m.param_names = {"a", "b", "alpha", "beta"};
  m.state_names = {"Y", "X"};
  m.domain = {Vector(4, -kHestonBox), Vector(4, kHestonBox)};
  m.affine_in_theta = true;

  m.drift = [](std::span<const double> x, std::span<const double> th) {
    return Vector{th[0] - th[1] * x[0], th[2] - th[3] * x[0]};
  };
  m.drift_jac_theta = [](std::span<const double> x, std::span<const double>) {
    return Matrix{{1.0, -x[0], 0.0, 0.0}, {0.0, 0.0, 1.0, -x[0]}};
  };
  m.drift_hess_theta = [](std::span<const double>, std::span<const double>) {
    return std::vector<Matrix>(2, Matrix(4, 4));
  };
  m.diffusion = [s1, s2, rho, rho_c](std::span<const double> x) {
    const double sy = std::sqrt(std::max(x[0], 0.0));
    return Matrix{{s1 * sy, 0.0}, {s2 * rho * sy, s2 * rho_c * sy}};
  };
  // g_a = C^{-1} e1 / Y and g_alpha = C^{-1} e2 / Y depend on Y only;
  // g_b = -C^{-1} e1 and g_beta = -C^{-1} e2 are constant.
  m.grad_g = [c_inv](std::span<const double> x, std::span<const double>, std::size_t j) {
    Matrix out(2, 2);
    if (j == 0 || j == 2) {
      const std::size_t col = j == 0 ? 0 : 1;
      const double inv_y2 = 1.0 / (x[0] * x[0]);
      out(0, 0) = -c_inv(0, col) * inv_y2;
      out(1, 0) = -c_inv(1, col) * inv_y2;
    }
    return out;
  };
  m.domain_guard = [](std::span<const double> x) {
    return Vector{std::max(x[0], kHestonVarianceFloor), x[1]};
  };
  m.domain_member = [](std::span<const double> x) { return x[0] > 0.0; };
  return m;
}

Vector heston_amle(const Path& path) {
  const GridSums s = grid_sums(path);
  const double t = s.horizon;
  const double denom = s.dt * s.dt * s.sum_y * s.sum_inv_y - t * t;
  // Cauchy-Schwarz: denom >= 0 with equality iff Y is constant on the grid;
  // anything within rounding of zero is treated as that degenerate case.
  if (!(denom > 1e-12 * t * t))
    throw NonIdentifiedError("Heston AMLE: dt^2 sum(Y) sum(1/Y) - T^2 = " +
                             std::to_string(denom) + " is not positive (Y constant on the grid?)");
  const double f = 1.0 / denom;
  return {f * (s.dt * s.sum_y * s.sum_dy_y - t * s.y_change),
          f * (t * s.sum_dy_y - s.dt * s.y_change * s.sum_inv_y),
          f * (s.dt * s.sum_y * s.sum_dx_y - t * s.x_change),
          f * (t * s.sum_dx_y - s.dt * s.x_change * s.sum_inv_y)};
}

Matrix heston_sigma_n(const Path& path, const HestonParams& params) {
  params.validate();
  const GridSums s = grid_sums(path);
  const double s1 = params.sigma1;
  const double s2 = params.sigma2;
  const double rho = params.rho;
  const double one_m_r2 = 1.0 - rho * rho;
  const double scale = 0.5 * s.dt * s.sum_inv_y2;
  Matrix out(4, 4);
  out(0, 0) = scale / one_m_r2;
  out(0, 2) = scale * (-s1 * rho / (s2 * one_m_r2));
  out(2, 0) = out(0, 2);
  out(2, 2) = scale * s1 * s1 / (s2 * s2 * one_m_r2);
  return out;
}

Matrix heston_hessian(const Path& path, const HestonParams& params) {
  params.validate();
  const GridSums s = grid_sums(path);
  const double s1 = params.sigma1;
  const double s2 = params.sigma2;
  const double rho = params.rho;
  const double g = 1.0 / (s1 * s1 * s2 * s2 * (1.0 - rho * rho));
  const Matrix correlation{{s2 * s2, -s1 * s2 * rho}, {-s1 * s2 * rho, s1 * s1}};
  const Matrix grid{{-s.dt * s.sum_inv_y, s.horizon}, {s.horizon, -s.dt * s.sum_y}};
  return g * kron(correlation, grid);
}

Vector heston_mle_fine(const Path& fine_path) {
  log2_exact(fine_path.n_steps());
  return heston_amle(fine_path);
}

}  // namespace amle
