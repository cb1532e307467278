#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "amle/matrix.hpp"
#include "amle/numerics.hpp"

namespace amle {

/// Axis-aligned box standing in for the open, bounded, convex parameter set.
struct ParameterDomain {
  Vector lower;
  Vector upper;

  std::size_t dim() const noexcept { return lower.size(); }
  bool contains(std::span<const double> theta) const;
  /// Clamp each coordinate into [lower, upper].
  Vector project(std::span<const double> theta) const;
  /// True if some coordinate sits exactly on a face of the box.
  bool on_boundary(std::span<const double> theta) const;
  Vector center() const;
  /// Throws InputError unless lower < upper componentwise and all finite.
  void validate() const;
};

using DriftFn = std::function<Vector(std::span<const double> x, std::span<const double> theta)>;
/// k x d matrix; column j is d mu / d theta_j.
using DriftJacFn = std::function<Matrix(std::span<const double> x, std::span<const double> theta)>;
/// k matrices of size d x d; entry [c](i, j) is d^2 mu_c / d theta_i d theta_j.
using DriftHessFn =
    std::function<std::vector<Matrix>(std::span<const double> x, std::span<const double> theta)>;
using DiffusionFn = std::function<Matrix(std::span<const double> x)>;
/// k x k matrix (p, q) = d g_j,p / d x_q.
using GradGFn =
    std::function<Matrix(std::span<const double> x, std::span<const double> theta, std::size_t j)>;
using GuardFn = std::function<Vector(std::span<const double> x)>;
using MemberFn = std::function<bool(std::span<const double> x)>;

/// A k-dimensional diffusion dX = mu(X, theta) dt + nu(X) dW with drift
/// parameters theta in R^d. Every callback must be pure and reentrant; a
/// ModelSpec is immutable after construction and can be shared across
/// threads.
///
/// Optional callbacks (empty std::function):
///  - drift_jac_theta: central differences of `drift` are used instead;
///  - drift_hess_theta: treated as zero only when `affine_in_theta` is set,
///    otherwise central differences of the Jacobian;
///  - grad_g: central differences of the sensitivity function;
///  - domain_guard: identity;
///  - domain_member: every finite state is admitted.
struct ModelSpec {
  std::string name;
  std::size_t k = 0;
  std::size_t d = 0;
  std::vector<std::string> param_names;
  std::vector<std::string> state_names;
  ParameterDomain domain;
  /// Drift is B(x) theta + c(x); enables the closed-form estimator.
  bool affine_in_theta = false;

  DriftFn drift;
  DriftJacFn drift_jac_theta;
  DriftHessFn drift_hess_theta;
  DiffusionFn diffusion;
  GradGFn grad_g;
  GuardFn domain_guard;
  MemberFn domain_member;

  /// Throws InputError on missing mandatory callbacks or inconsistent sizes.
  void validate() const;
};

bool in_domain(const ModelSpec& model, std::span<const double> x);
Vector guard_state(const ModelSpec& model, std::span<const double> x);

/// Throws InputError naming the offending component when x is not a finite
/// admissible state.
void require_state(const ModelSpec& model, std::span<const double> x);
void require_theta(const ModelSpec& model, std::span<const double> theta);

Vector eval_drift(const ModelSpec& model, std::span<const double> x, std::span<const double> theta);
Matrix eval_drift_jac_theta(const ModelSpec& model, std::span<const double> x,
                            std::span<const double> theta);
std::vector<Matrix> eval_drift_hess_theta(const ModelSpec& model, std::span<const double> x,
                                          std::span<const double> theta);
Matrix eval_diffusion(const ModelSpec& model, std::span<const double> x);

/// S(x) = nu(x) nu(x)^T, exactly symmetric.
Matrix eval_diffusion_matrix(const ModelSpec& model, std::span<const double> x);

/// Inverse via symmetric eigendecomposition; throws SingularDiffusionError
/// when the smallest eigenvalue is <= rank_tol * largest (or S is zero).
Matrix invert_diffusion_matrix(const Matrix& s, double rank_tol = kDefaultRankTol);

/// g_j(x, theta) = S^{-1}(x) d_j mu(x, theta); j is zero-based.
Vector sensitivity_g(const ModelSpec& model, std::span<const double> x,
                     std::span<const double> theta, std::size_t j);

struct EllipticityReport {
  double min_eigenvalue = 0.0;
  Vector arg_min;
  bool uniform = false;
};

EllipticityReport check_uniform_ellipticity(const ModelSpec& model,
                                            const std::vector<Vector>& sample, double threshold);

/// A model together with the data-generating values used to simulate it.
struct ModelSetup {
  ModelSpec model;
  Vector true_theta;
  Vector initial_state;
};

/// Name -> factory lookup used by the CLI. "heston" and "ou" are built in;
/// further ("custom") models can be registered from code.
class ModelRegistry {
 public:
  using Params = std::map<std::string, double>;
  using Factory = std::function<ModelSetup(const Params&)>;

  static ModelRegistry& instance();

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  ModelSetup make(const std::string& name, const Params& params) const;
  std::vector<std::string> names() const;

 private:
  ModelRegistry();
  std::map<std::string, Factory> factories_;
};

}  // namespace amle
