#include <doctest.h>

#include <cmath>

#include "amle/errors.hpp"
#include "amle/estimator.hpp"
#include "amle/heston.hpp"
#include "amle/likelihood.hpp"
#include "amle/models.hpp"
#include "test_models.hpp"

using namespace amle;
using namespace amle::testing;

namespace {

Path heston_path(std::uint64_t stream, std::size_t n = 1024) {
  const HestonParams hp;
  return euler_simulate(heston_model(hp), hp.theta(), hp.initial_state(), TimeGrid(hp.T, n),
                        NoiseSource(90, stream));
}

}  // namespace

TEST_CASE("constant drift: theta-bar is the mean slope") {
  const ModelSpec m = constant_drift_model(1);
  const Path p = make_path(2.0, {{1.0}, {1.7}, {0.2}, {2.5}, {3.0}});
  const EstimateResult r = amle_linear(m, p);
  CHECK(r.theta[0] == doctest::Approx((3.0 - 1.0) / 2.0).epsilon(1e-14));
  CHECK(r.converged);
  CHECK(r.method == EstimateMethod::ClosedFormLinear);
  CHECK(r.hessian_max_eigenvalue < 0.0);

  const Path flat = make_path(1.0, {{0.0}, {0.5}, {-0.25}, {0.0}});
  CHECK(std::abs(amle_linear(m, flat).theta[0]) <= 1e-15);
}

TEST_CASE("Heston: generic normal equations reproduce the closed form") {
  const ModelSpec m = heston_model(HestonParams{});
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Path p = heston_path(i);
    const EstimateResult r = amle_linear(m, p);
    const Vector closed = heston_amle(p);
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(r.theta[j] - closed[j]) <= 1e-9 * std::max(1.0, std::abs(closed[j])));
    CHECK(r.converged);
    // stationarity, re-evaluated independently of the solver
    CHECK(norm_inf(grad_loglik_n(m, p, r.theta)) <=
          stationarity_tolerance(LikelihoodContext(m, p), r.theta));
  }
}

TEST_CASE("amle_linear rejects nonlinear models and flat likelihoods") {
  const ModelSpec sine = sine_drift_model();
  const Path p = make_path(1.0, {{1.0}, {1.1}, {1.3}});
  CHECK_THROWS_AS(amle_linear(sine, p), InputError);

  const ModelSpec zero = zero_drift_model(1);
  CHECK_THROWS_AS(amle_linear(zero, p), NonIdentifiedError);

  HestonParams hp;
  const ModelSpec h = heston_model(hp);
  const Path constant = make_path(1.0, {{0.5, 1.0}, {0.5, 1.1}, {0.5, 0.9}, {0.5, 1.0}});
  CHECK_THROWS_AS(amle_linear(h, constant), NonIdentifiedError);
}

TEST_CASE("Newton reaches the closed-form maximizer from random starts") {
  const ModelSpec m = heston_model(HestonParams{});
  NoiseSource noise(91, 0);
  for (std::uint64_t i = 0; i < 3; ++i) {
    const Path p = heston_path(10 + i);
    const EstimateResult lin = amle_linear(m, p);
    for (int t = 0; t < 10; ++t) {
      Vector init(4);
      for (auto& v : init) v = 20.0 * noise.normal();
      const EstimateResult nt = amle_newton(m, p, init);
      CHECK(nt.converged);
      CHECK(nt.method == EstimateMethod::Newton);
      CHECK(relative_error(nt.theta, lin.theta) <= 1e-8);
    }
  }
}

TEST_CASE("Newton does nothing at a stationary point") {
  const ModelSpec m = heston_model(HestonParams{});
  const Path p = heston_path(20);
  const EstimateResult lin = amle_linear(m, p);
  const EstimateResult nt = amle_newton(m, p, lin.theta);
  CHECK(nt.iterations == 0);
  CHECK(nt.converged);
  CHECK(nt.theta == lin.theta);
}

TEST_CASE("Newton on a nonlinear drift finds the global maximum") {
  const ModelSpec m = sine_drift_model(0.3);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Path p = euler_simulate(m, Vector{0.6}, Vector{1.0}, TimeGrid(1.0, 512), NoiseSource(92, s));
    const EstimateResult r = estimate_amle(m, p);
    REQUIRE(r.converged);
    CHECK(r.method == EstimateMethod::Newton);
    const LikelihoodContext ctx(m, p);
    CHECK(norm_inf(ctx.gradient(r.theta)) <= stationarity_tolerance(ctx, r.theta));

    // grid search oracle over the parameter box
    double best = -1.5;
    double best_value = ctx.value(Vector{best});
    for (int i = 0; i <= 30000; ++i) {
      const double th = -1.5 + 3.0 * i / 30000.0;
      const double v = ctx.value(Vector{th});
      if (v > best_value) {
        best_value = v;
        best = th;
      }
    }
    CHECK(std::abs(r.theta[0] - best) <= 2e-4);
    CHECK(ctx.value(r.theta) >= best_value - 1e-9 * std::abs(best_value));
  }
}

TEST_CASE("Newton stopping on the box boundary is not convergence") {
  // The likelihood of mu = theta increases without bound towards theta = +inf
  // within a box that excludes the true maximizer.
  ModelSpec m = constant_drift_model(1);
  m.domain = {Vector{-1.0}, Vector{1.0}};
  const Path p = make_path(1.0, {{0.0}, {2.0}, {5.0}});
  const EstimateResult r = amle_newton(m, p, Vector{0.0});
  CHECK_FALSE(r.converged);
  CHECK(r.on_boundary);
  CHECK(r.theta[0] == 1.0);
  CHECK_THROWS_AS(amle_newton(m, p, Vector{3.0}), InputError);
}

TEST_CASE("relabeling parameters permutes the estimate") {
  const HestonParams hp;
  const ModelSpec base = heston_model(hp);
  const Path p = heston_path(30);
  const EstimateResult r = amle_linear(base, p);

  NoiseSource noise(93, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto perm = random_permutation(4, noise);  // new index -> old index
    ModelSpec m = base;
    auto unpermute = [perm](std::span<const double> th) {
      Vector old(4);
      for (std::size_t i = 0; i < 4; ++i) old[perm[i]] = th[i];
      return old;
    };
    m.drift = [base, unpermute](std::span<const double> x, std::span<const double> th) {
      return base.drift(x, unpermute(th));
    };
    m.drift_jac_theta = [base, perm](std::span<const double> x, std::span<const double>) {
      const Matrix j = base.drift_jac_theta(x, Vector(4, 0.0));
      Matrix out(2, 4);
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t i = 0; i < 4; ++i) out(r, i) = j(r, perm[i]);
      return out;
    };
    m.param_names.clear();
    m.grad_g = nullptr;
    const EstimateResult q = amle_linear(m, p);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(q.theta[i] - r.theta[perm[i]]) <= 1e-10 * std::max(1.0, std::abs(r.theta[perm[i]])));
  }
}

TEST_CASE("mle_proxy is the estimator on the finest grid") {
  const HestonParams hp;
  const ModelSpec m = heston_model(hp);
  const Path p = heston_path(40, 4096);
  const EstimateResult proxy = mle_proxy(m, p);
  CHECK(proxy.theta == amle_linear(m, p).theta);
  CHECK(proxy.theta == estimate_amle(m, subsample(p, 12)).theta);
  for (double v : proxy.theta) CHECK(std::isfinite(v));

  const ModelSpec c = constant_drift_model(1, 1.0);
  const Path det = euler_simulate(constant_drift_model(1, 0.0), Vector{0.75}, Vector{0.0},
                                  TimeGrid(2.0, 8), NoiseSource(1, 0));
  CHECK(mle_proxy(c, det).theta[0] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("OU estimates concentrate around the truth") {
  const OuParams op;
  const ModelSpec m = ou_model(op);
  Vector mean(2, 0.0);
  const int reps = 50;
  for (int s = 0; s < reps; ++s) {
    const Path p = euler_simulate(m, op.theta(), op.initial_state(), TimeGrid(50.0, 20000),
                                  NoiseSource(94, static_cast<std::uint64_t>(s)));
    const EstimateResult r = estimate_amle(m, p);
    REQUIRE(r.converged);
    mean = mean + r.theta;
  }
  mean = (1.0 / reps) * mean;
  CHECK(mean[0] == doctest::Approx(op.alpha).epsilon(0.15));
  CHECK(mean[1] == doctest::Approx(op.beta).epsilon(0.15));
}

TEST_CASE("method names") {
  CHECK(to_string(EstimateMethod::ClosedFormLinear) == "closed-form-linear");
  CHECK(to_string(EstimateMethod::Newton) == "newton");
}
