#include "amle/estimator.hpp"

#include <cmath>
#include <limits>

#include "amle/errors.hpp"
#include "amle/numerics.hpp"

namespace amle {

std::string_view to_string(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::ClosedFormLinear:
      return "closed-form-linear";
    case EstimateMethod::Newton:
      return "newton";
  }
  return "unknown";
}

namespace {

double max_eigenvalue(const Matrix& h) { return sym_eigen(symmetrized(h)).eigenvalues.front(); }

bool negative_definite(const Matrix& h) {
  const SymmetricEigen eig = sym_eigen(symmetrized(h));
  const double scale = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  return scale > 0.0 && eig.eigenvalues.front() < -1e-12 * scale;
}

}  // namespace

double stationarity_tolerance(const LikelihoodContext& ctx, std::span<const double> theta,
                              double tol) {
  // Sum of |terms| entering the gradient bounds the attainable accuracy.
  const ModelSpec& model = ctx.model();
  const double dt = ctx.dt();
  double magnitude = 0.0;
  Vector residual(model.k);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto x = ctx.path().state(i);
    const Vector mu = model.drift(x, theta);
    const auto dx = ctx.increment(i);
    const Matrix jac = eval_drift_jac_theta(model, x, theta);
    for (std::size_t c = 0; c < model.k; ++c)
      residual[c] = std::abs(dx[c]) + dt * std::abs(mu[c]);
    for (std::size_t r = 0; r < model.k; ++r)
      for (std::size_t c = 0; c < model.k; ++c)
        for (std::size_t j = 0; j < model.d; ++j)
          magnitude += std::abs(jac(r, j) * ctx.s_inv(i)(r, c) * residual[c]);
  }
  return tol * (1.0 + std::abs(ctx.value(theta))) +
         64.0 * std::numeric_limits<double>::epsilon() * magnitude;
}

EstimateResult amle_linear(const ModelSpec& model, const Path& path) {
  if (!model.affine_in_theta)
    throw InputError("amle_linear: model '" + model.name + "' does not declare an affine drift");
  const LikelihoodContext ctx(model, path);
  const std::size_t d = model.d;
  const double dt = ctx.dt();
  const Vector zero(d, 0.0);

  Matrix h(d, d);
  Vector r(d, 0.0);
  Vector residual(model.k);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto x = path.state(i);
    const Matrix b = eval_drift_jac_theta(model, x, zero);
    const Vector c = model.drift(x, zero);
    const auto dx = ctx.increment(i);
    const Matrix sb = ctx.s_inv(i) * b;
    for (std::size_t p = 0; p < model.k; ++p) residual[p] = dx[p] - dt * c[p];
    const Vector rc = transpose_times(sb, residual);
    for (std::size_t a = 0; a < d; ++a) {
      r[a] += rc[a];
      for (std::size_t bb = a; bb < d; ++bb) {
        double s = 0.0;
        for (std::size_t p = 0; p < model.k; ++p) s += b(p, a) * sb(p, bb);
        h(a, bb) -= dt * s;
      }
    }
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t bb = 0; bb < a; ++bb) h(a, bb) = h(bb, a);

  if (!negative_definite(h))
    throw NonIdentifiedError("amle_linear: likelihood Hessian is not negative definite; "
                             "drift parameters are not identified by this path");

  Matrix neg_h = h;
  neg_h *= -1.0;
  Vector theta;
  try {
    theta = solve_linear(neg_h, r);
  } catch (const SingularSystemError& e) {
    throw NonIdentifiedError(std::string("amle_linear: ") + e.what());
  }
  if (!all_finite(theta)) throw NonIdentifiedError("amle_linear: non-finite estimate");

  EstimateResult result;
  result.theta = theta;
  result.method = EstimateMethod::ClosedFormLinear;
  result.iterations = 1;
  result.hessian_max_eigenvalue = max_eigenvalue(h);
  result.grad_norm = norm_inf(ctx.gradient(theta));
  result.on_boundary = !model.domain.contains(theta) || model.domain.on_boundary(theta);
  result.converged = result.hessian_max_eigenvalue < 0.0 && !result.on_boundary &&
                     result.grad_norm <= stationarity_tolerance(ctx, theta);
  return result;
}

EstimateResult amle_newton(const ModelSpec& model, const Path& path, std::span<const double> init,
                           const NewtonOptions& options) {
  require_theta(model, init);
  if (!model.domain.contains(init))
    throw InputError("amle_newton: initial point outside the parameter box");
  const LikelihoodContext ctx(model, path);

  EstimateResult result;
  result.method = EstimateMethod::Newton;
  Vector theta(init.begin(), init.end());
  LikelihoodEvaluation eval = ctx.evaluate(theta);

  auto finish = [&](bool stationary) {
    result.theta = theta;
    result.grad_norm = norm_inf(eval.gradient);
    result.hessian_max_eigenvalue = max_eigenvalue(eval.hessian);
    result.on_boundary = model.domain.on_boundary(theta);
    result.converged = stationary && negative_definite(eval.hessian) && !result.on_boundary;
    return result;
  };

  for (int iter = 0;; ++iter) {
    result.iterations = iter;
    const double tol = stationarity_tolerance(ctx, theta, options.tol);
    if (norm_inf(eval.gradient) <= tol) return finish(true);
    if (iter >= options.max_iter) return finish(false);

    // Newton direction when -H is positive definite, otherwise plain ascent.
    Vector step;
    if (negative_definite(eval.hessian)) {
      Matrix neg_h = eval.hessian;
      neg_h *= -1.0;
      try {
        step = solve_linear(neg_h, eval.gradient);
      } catch (const SingularSystemError&) {
        step.clear();
      }
    }
    if (step.empty() || !all_finite(step) || dot(step, eval.gradient) <= 0.0)
      step = (1.0 / std::max(1.0, norm_inf(eval.gradient))) * eval.gradient;

    bool improved = false;
    double t = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      Vector candidate = theta;
      for (std::size_t j = 0; j < candidate.size(); ++j) candidate[j] += t * step[j];
      candidate = model.domain.project(candidate);
      const double value = ctx.value(candidate);
      if (!std::isfinite(value)) continue;
      // Near the optimum the gain drops below the rounding of l_n itself;
      // there a step that is flat in value but reduces the gradient counts.
      const bool flat = std::abs(value - eval.value) <=
                        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(eval.value));
      if (value > eval.value || flat) {
        LikelihoodEvaluation next = ctx.evaluate(candidate);
        if (value > eval.value || norm_inf(next.gradient) < norm_inf(eval.gradient)) {
          theta = std::move(candidate);
          eval = std::move(next);
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      result.iterations = iter + 1;
      return finish(norm_inf(eval.gradient) <= tol);
    }
  }
}

EstimateResult estimate_amle(const ModelSpec& model, const Path& path) {
  if (model.affine_in_theta) return amle_linear(model, path);
  return amle_newton(model, path, model.domain.center());
}

EstimateResult mle_proxy(const ModelSpec& model, const Path& fine_path) {
  return estimate_amle(model, fine_path);
}

}  // namespace amle
