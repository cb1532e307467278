#include "amle/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "amle/errors.hpp"
#include "amle/heston.hpp"
#include "amle/models.hpp"

namespace amle {

namespace {

std::string describe(std::span<const double> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// ParameterDomain
// ---------------------------------------------------------------------------

bool ParameterDomain::contains(std::span<const double> theta) const {
  if (theta.size() != lower.size()) return false;
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (!(theta[i] >= lower[i] && theta[i] <= upper[i])) return false;
  return true;
}

Vector ParameterDomain::project(std::span<const double> theta) const {
  Vector out(theta.begin(), theta.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
  return out;
}

bool ParameterDomain::on_boundary(std::span<const double> theta) const {
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (theta[i] == lower[i] || theta[i] == upper[i]) return true;
  return false;
}

Vector ParameterDomain::center() const {
  Vector c(lower.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

void ParameterDomain::validate() const {
  if (lower.size() != upper.size())
    throw InputError("parameter domain: lower and upper bounds differ in length");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw InputError("parameter domain: bound " + std::to_string(i) + " is not finite");
    if (!(lower[i] < upper[i]))
      throw InputError("parameter domain: lower >= upper at component " + std::to_string(i));
  }
}

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

void ModelSpec::validate() const {
  if (k == 0) throw InputError("model '" + name + "': state dimension is zero");
  if (d == 0) throw InputError("model '" + name + "': parameter dimension is zero");
  if (!drift) throw InputError("model '" + name + "': drift callback missing");
  if (!diffusion) throw InputError("model '" + name + "': diffusion callback missing");
  if (domain.dim() != d)
    throw InputError("model '" + name + "': parameter domain has dimension " +
                     std::to_string(domain.dim()) + ", expected " + std::to_string(d));
  domain.validate();
  if (!param_names.empty() && param_names.size() != d)
    throw InputError("model '" + name + "': param_names size mismatch");
  if (!state_names.empty() && state_names.size() != k)
    throw InputError("model '" + name + "': state_names size mismatch");
}

bool in_domain(const ModelSpec& model, std::span<const double> x) {
  if (x.size() != model.k || !all_finite(x)) return false;
  return !model.domain_member || model.domain_member(x);
}

Vector guard_state(const ModelSpec& model, std::span<const double> x) {
  if (model.domain_guard) return model.domain_guard(x);
  return Vector(x.begin(), x.end());
}

void require_state(const ModelSpec& model, std::span<const double> x) {
  if (x.size() != model.k)
    throw InputError("state has " + std::to_string(x.size()) + " components, model '" +
                     model.name + "' expects " + std::to_string(model.k));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]))
      throw InputError("state component " + std::to_string(i) + " is not finite");
  if (model.domain_member && !model.domain_member(x)) {
    // Name the first component whose guarded value differs; fall back to the
    // whole vector when the guard cannot localize the violation.
    const Vector g = guard_state(model, x);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (g[i] != x[i])
        throw InputError("state " + describe(x) + " outside the domain of model '" + model.name +
                         "' at component " + std::to_string(i));
    throw InputError("state " + describe(x) + " outside the domain of model '" + model.name + "'");
  }
}

void require_theta(const ModelSpec& model, std::span<const double> theta) {
  if (theta.size() != model.d)
    throw InputError("parameter vector has " + std::to_string(theta.size()) +
                     " components, model '" + model.name + "' expects " + std::to_string(model.d));
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (!std::isfinite(theta[i]))
      throw InputError("parameter component " + std::to_string(i) + " is not finite");
}

Vector eval_drift(const ModelSpec& model, std::span<const double> x,
                  std::span<const double> theta) {
  require_state(model, x);
  require_theta(model, theta);
  Vector mu = model.drift(x, theta);
  if (mu.size() != model.k) throw InputError("drift callback returned wrong dimension");
  if (!all_finite(mu)) throw NumericalError("drift is not finite at state " + describe(x));
  return mu;
}

Matrix eval_drift_jac_theta(const ModelSpec& model, std::span<const double> x,
                            std::span<const double> theta) {
  if (model.drift_jac_theta) return model.drift_jac_theta(x, theta);
  const Vector xs(x.begin(), x.end());
  return fd_jacobian([&](std::span<const double> t) { return model.drift(xs, t); }, theta, 1e-6);
}

std::vector<Matrix> eval_drift_hess_theta(const ModelSpec& model, std::span<const double> x,
                                          std::span<const double> theta) {
  if (model.drift_hess_theta) return model.drift_hess_theta(x, theta);
  std::vector<Matrix> out(model.k, Matrix(model.d, model.d));
  if (model.affine_in_theta) return out;
  const Vector xs(x.begin(), x.end());
  Vector probe(theta.begin(), theta.end());
  if (!model.drift_jac_theta) {
    // Second differences of the drift itself; nesting two first differences
    // would lose roughly twice the digits.
    Vector h(model.d);
    for (std::size_t i = 0; i < model.d; ++i) h[i] = 1e-4 * std::max(1.0, std::abs(theta[i]));
    auto mu_at = [&](std::size_t i, double si, std::size_t j, double sj) {
      probe[i] += si * h[i];
      probe[j] += sj * h[j];
      Vector v = model.drift(xs, probe);
      probe[i] = theta[i];
      probe[j] = theta[j];
      return v;
    };
    const Vector mu0 = model.drift(xs, theta);
    for (std::size_t i = 0; i < model.d; ++i) {
      const Vector up = mu_at(i, 1.0, i, 0.0);
      const Vector dn = mu_at(i, -1.0, i, 0.0);
      for (std::size_t c = 0; c < model.k; ++c)
        out[c](i, i) = (up[c] - 2.0 * mu0[c] + dn[c]) / (h[i] * h[i]);
      for (std::size_t j = i + 1; j < model.d; ++j) {
        const Vector pp = mu_at(i, 1.0, j, 1.0);
        const Vector pm = mu_at(i, 1.0, j, -1.0);
        const Vector mp = mu_at(i, -1.0, j, 1.0);
        const Vector mm = mu_at(i, -1.0, j, -1.0);
        for (std::size_t c = 0; c < model.k; ++c) {
          out[c](i, j) = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h[i] * h[j]);
          out[c](j, i) = out[c](i, j);
        }
      }
    }
    return out;
  }
  // Differentiate the analytic Jacobian column-wise: d/dtheta_i of column j.
  for (std::size_t i = 0; i < model.d; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta[i]));
    probe[i] = theta[i] + h;
    const Matrix jp = eval_drift_jac_theta(model, xs, probe);
    probe[i] = theta[i] - h;
    const Matrix jm = eval_drift_jac_theta(model, xs, probe);
    probe[i] = theta[i];
    for (std::size_t c = 0; c < model.k; ++c)
      for (std::size_t j = 0; j < model.d; ++j) out[c](i, j) = (jp(c, j) - jm(c, j)) / (2.0 * h);
  }
  for (auto& m : out) m = symmetrized(m);
  return out;
}

Matrix eval_diffusion(const ModelSpec& model, std::span<const double> x) {
  Matrix nu = model.diffusion(x);
  if (nu.rows() != model.k || nu.cols() != model.k)
    throw InputError("diffusion callback must return a k x k matrix");
  return nu;
}

Matrix eval_diffusion_matrix(const ModelSpec& model, std::span<const double> x) {
  require_state(model, x);
  const Matrix nu = eval_diffusion(model, x);
  const std::size_t k = model.k;
  Matrix s(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const double v = dot(nu.row(i), nu.row(j));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

Matrix invert_diffusion_matrix(const Matrix& s, double rank_tol) {
  const SymmetricEigen eig = sym_eigen(s);
  const double lmax = eig.eigenvalues.front();
  const double lmin = eig.eigenvalues.back();
  if (!(lmax > 0.0) || !(lmin > rank_tol * lmax))
    throw SingularDiffusionError("diffusion matrix is singular (eigenvalues in [" +
                                 std::to_string(lmin) + ", " + std::to_string(lmax) + "])");
  const std::size_t n = s.rows();
  Matrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const double w = 1.0 / eig.eigenvalues[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = eig.eigenvectors(i, c) * w;
      for (std::size_t j = 0; j < n; ++j) inv(i, j) += ui * eig.eigenvectors(j, c);
    }
  }
  return symmetrized(inv);
}

Vector sensitivity_g(const ModelSpec& model, std::span<const double> x,
                     std::span<const double> theta, std::size_t j) {
  if (j >= model.d)
    throw InputError("sensitivity index " + std::to_string(j) + " out of range for d = " +
                     std::to_string(model.d));
  require_state(model, x);
  require_theta(model, theta);
  const Matrix s_inv = invert_diffusion_matrix(eval_diffusion_matrix(model, x));
  const Matrix jac = eval_drift_jac_theta(model, x, theta);
  return s_inv * jac.column(j);
}

EllipticityReport check_uniform_ellipticity(const ModelSpec& model,
                                            const std::vector<Vector>& sample, double threshold) {
  if (sample.empty()) throw InputError("ellipticity check needs a nonempty sample");
  EllipticityReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& x : sample) {
    const double lmin = sym_eigen(eval_diffusion_matrix(model, x)).eigenvalues.back();
    if (lmin < report.min_eigenvalue) {
      report.min_eigenvalue = lmin;
      report.arg_min = x;
    }
  }
  report.uniform = report.min_eigenvalue >= threshold;
  return report;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

ModelRegistry::ModelRegistry() {
  factories_["heston"] = [](const Params& p) {
    const HestonParams hp = heston_params_from(p);
    return ModelSetup{heston_model(hp), hp.theta(), hp.initial_state()};
  };
  factories_["ou"] = [](const Params& p) {
    const OuParams op = ou_params_from(p);
    return ModelSetup{ou_model(op), op.theta(), op.initial_state()};
  };
}

ModelRegistry& ModelRegistry::instance() {
  static ModelRegistry registry;
  return registry;
}

void ModelRegistry::add(const std::string& name, Factory factory) {
  std::lock_guard lock(registry_mutex());
  factories_[name] = std::move(factory);
}

bool ModelRegistry::contains(const std::string& name) const {
  std::lock_guard lock(registry_mutex());
  return factories_.count(name) > 0;
}

ModelSetup ModelRegistry::make(const std::string& name, const Params& params) const {
  Factory f;
  {
    std::lock_guard lock(registry_mutex());
    const auto it = factories_.find(name);
    if (it == factories_.end()) throw InputError("unknown model '" + name + "'");
    f = it->second;
  }
  return f(params);
}

std::vector<std::string> ModelRegistry::names() const {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

}  // namespace amle
