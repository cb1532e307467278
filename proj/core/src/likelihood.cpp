#include "amle/likelihood.hpp"

#include <string>

#include "amle/errors.hpp"

namespace amle {

LikelihoodContext::LikelihoodContext(const ModelSpec& model, const Path& path)
    : model_(model), path_(path) {
  model.validate();
  path.validate();
  if (path.dim() != model.k)
    throw InputError("path has " + std::to_string(path.dim()) + " state components, model '" +
                     model.name + "' expects " + std::to_string(model.k));
  const std::size_t n = path.n_steps();
  s_inv_.reserve(n);
  increments_ = Matrix(n, model.k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = path.state(i);
    try {
      s_inv_.push_back(invert_diffusion_matrix(eval_diffusion_matrix(model, x)));
    } catch (const SingularDiffusionError& e) {
      throw SingularDiffusionError("grid index " + std::to_string(i) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("grid index " + std::to_string(i) + ": " + e.what());
    }
    const auto next = path.state(i + 1);
    for (std::size_t c = 0; c < model.k; ++c) increments_(i, c) = next[c] - x[c];
  }
}

double LikelihoodContext::value(std::span<const double> theta) const {
  require_theta(model_, theta);
  const double dt = this->dt();
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const Vector mu = model_.drift(path_.state(i), theta);
    const Vector w = s_inv_[i] * mu;
    linear += dot(w, increment(i));
    quadratic += dot(w, mu);
  }
  return linear - 0.5 * dt * quadratic;
}

Vector LikelihoodContext::gradient(std::span<const double> theta) const {
  require_theta(model_, theta);
  const double dt = this->dt();
  const std::size_t k = model_.k;
  Vector grad(model_.d, 0.0);
  Vector residual(k);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto x = path_.state(i);
    const Vector mu = model_.drift(x, theta);
    const auto dx = increment(i);
    for (std::size_t c = 0; c < k; ++c) residual[c] = dx[c] - dt * mu[c];
    const Vector w = s_inv_[i] * residual;
    const Matrix jac = eval_drift_jac_theta(model_, x, theta);
    const Vector contrib = transpose_times(jac, w);
    for (std::size_t j = 0; j < model_.d; ++j) grad[j] += contrib[j];
  }
  return grad;
}

Matrix LikelihoodContext::hessian(std::span<const double> theta) const {
  require_theta(model_, theta);
  const double dt = this->dt();
  const std::size_t k = model_.k;
  const std::size_t d = model_.d;
  const bool curved = !model_.affine_in_theta;
  Matrix second(d, d);  // sum of <S^-1 d_i d_j mu | residual>
  Matrix gram(d, d);    // sum of <d_i mu | S^-1 d_j mu>
  Vector residual(k);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto x = path_.state(i);
    const Matrix jac = eval_drift_jac_theta(model_, x, theta);
    const Matrix sj = s_inv_[i] * jac;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += jac(c, a) * sj(c, b);
        gram(a, b) += s;
      }
    if (curved) {
      const Vector mu = model_.drift(x, theta);
      const auto dx = increment(i);
      for (std::size_t c = 0; c < k; ++c) residual[c] = dx[c] - dt * mu[c];
      const Vector w = s_inv_[i] * residual;
      const std::vector<Matrix> hess = eval_drift_hess_theta(model_, x, theta);
      for (std::size_t c = 0; c < k; ++c) {
        if (w[c] == 0.0) continue;
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = a; b < d; ++b) second(a, b) += w[c] * hess[c](a, b);
      }
    }
  }
  Matrix out(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      const double v = second(a, b) - dt * gram(a, b);
      out(a, b) = v;
      out(b, a) = v;
    }
  return out;
}

LikelihoodEvaluation LikelihoodContext::evaluate(std::span<const double> theta) const {
  return {value(theta), gradient(theta), hessian(theta)};
}

double loglik_n(const ModelSpec& model, const Path& path, std::span<const double> theta) {
  return LikelihoodContext(model, path).value(theta);
}

Vector grad_loglik_n(const ModelSpec& model, const Path& path, std::span<const double> theta) {
  return LikelihoodContext(model, path).gradient(theta);
}

Matrix hess_loglik_n(const ModelSpec& model, const Path& path, std::span<const double> theta) {
  return LikelihoodContext(model, path).hessian(theta);
}

}  // namespace amle
