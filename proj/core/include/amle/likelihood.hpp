#pragma once

#include <vector>

#include "amle/matrix.hpp"
#include "amle/model.hpp"
#include "amle/simulator.hpp"

namespace amle {

/// Discretized log-likelihood and its theta-derivatives. The theta-free
/// normalizing constant is omitted, so values are only comparable between
/// parameter vectors on the same path.
struct LikelihoodEvaluation {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// Per-path evaluation context. Computes S^{-1}(X_{i-1}) once for every grid
/// point and reuses it across evaluations at different theta. Holds
/// references to `model` and `path`; both must outlive the context. Not
/// meant to be shared between threads (create one per worker).
class LikelihoodContext {
 public:
  /// Throws SingularDiffusionError naming the grid index where S is singular.
  LikelihoodContext(const ModelSpec& model, const Path& path);

  const ModelSpec& model() const noexcept { return model_; }
  const Path& path() const noexcept { return path_; }
  double dt() const noexcept { return path_.grid.dt(); }
  std::size_t size() const noexcept { return s_inv_.size(); }

  /// S^{-1}(X_{i}) for i = 0..n-1.
  const Matrix& s_inv(std::size_t i) const { return s_inv_[i]; }
  /// X_{i+1} - X_i for i = 0..n-1.
  std::span<const double> increment(std::size_t i) const { return increments_.row(i); }

  double value(std::span<const double> theta) const;
  Vector gradient(std::span<const double> theta) const;
  Matrix hessian(std::span<const double> theta) const;
  LikelihoodEvaluation evaluate(std::span<const double> theta) const;

 private:
  const ModelSpec& model_;
  const Path& path_;
  std::vector<Matrix> s_inv_;
  Matrix increments_;
};

double loglik_n(const ModelSpec& model, const Path& path, std::span<const double> theta);
Vector grad_loglik_n(const ModelSpec& model, const Path& path, std::span<const double> theta);
Matrix hess_loglik_n(const ModelSpec& model, const Path& path, std::span<const double> theta);

}  // namespace amle
