#include <doctest.h>

#include <cmath>

#include "amle/asymptotics.hpp"
#include "amle/errors.hpp"
#include "amle/estimator.hpp"
#include "amle/heston.hpp"
#include "amle/likelihood.hpp"
#include "amle/numerics.hpp"
#include "test_models.hpp"

using namespace amle;
using namespace amle::testing;

namespace {

Path simulate(const HestonParams& hp, std::uint64_t stream, std::size_t n) {
  return euler_simulate(heston_model(hp), hp.theta(), hp.initial_state(), TimeGrid(hp.T, n),
                        NoiseSource(100, stream));
}

}  // namespace

TEST_CASE("reference parameters") {
  const HestonParams hp;
  CHECK(hp.feller_ok());
  CHECK(hp.x0 == doctest::Approx(std::log(100.0)).epsilon(1e-15));
  CHECK(hp.theta() == Vector{2.0, -0.8, 0.02, 2.0});
  HestonParams low = hp;
  low.a = 0.2;
  CHECK_FALSE(low.feller_ok());

  const HestonParams from = heston_params_from({{"a", 1.5}, {"rho", 0.3}});
  CHECK(from.a == 1.5);
  CHECK(from.rho == 0.3);
  CHECK(from.sigma1 == 0.7);
  CHECK_THROWS_AS(heston_params_from({{"sigma1", -1.0}}), InputError);
  CHECK_THROWS_AS(heston_params_from({{"y0", 0.0}}), InputError);
}

TEST_CASE("model structure") {
  const HestonParams hp;
  const ModelSpec m = heston_model(hp);
  CHECK_NOTHROW(m.validate());
  CHECK(m.affine_in_theta);
  const Matrix s = eval_diffusion_matrix(m, Vector{0.5, 0.0});
  CHECK(max_abs(s - Matrix{{0.245, -0.168}, {-0.168, 0.18}}) <= 1e-15);

  HestonParams indep = hp;
  indep.rho = 0.0;
  const Matrix nu = eval_diffusion(heston_model(indep), Vector{0.25, 0.0});
  CHECK(nu(0, 1) == 0.0);
  CHECK(nu(1, 0) == 0.0);
  CHECK(nu(0, 0) == doctest::Approx(0.35));
  CHECK(nu(1, 1) == doctest::Approx(0.3));
}

TEST_CASE("closed-form estimator") {
  const HestonParams hp;
  const ModelSpec m = heston_model(hp);
  const Path constant = make_path(1.0, {{0.5, 1.0}, {0.5, 1.2}, {0.5, 0.7}, {0.5, 1.0}, {0.5, 1.1}});
  CHECK_THROWS_AS(heston_amle(constant), NonIdentifiedError);

  const Path zero = make_path(1.0, {{0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}});
  CHECK_THROWS_AS(heston_amle(zero), NonIdentifiedError);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const Path p = simulate(hp, s, 2048);
    const Vector closed = heston_amle(p);
    const Vector generic = amle_linear(m, p).theta;
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(closed[j] - generic[j]) <= 1e-9 * std::max(1.0, std::abs(closed[j])));
    CHECK(norm_inf(grad_loglik_n(m, p, closed)) <=
          stationarity_tolerance(LikelihoodContext(m, p), closed, 1e-9));
  }
}

TEST_CASE("zero increments null the estimate") {
  // sum dY / Y >= sum ln(Y_i / Y_{i-1}) = 0 on a closed loop, with equality
  // only for constant Y, so zero Y increments cannot be combined with a
  // nonconstant Y on a real path. Zero X increments can.
  const Path p = make_path(1.0, {{1.0, 2.0}, {2.0, 2.0}, {1.0, 2.0}, {2.0, 2.0}, {1.0, 2.0}});
  const Vector est = heston_amle(p);
  CHECK(est[2] == 0.0);
  CHECK(est[3] == 0.0);
  CHECK(est[0] != 0.0);
}

TEST_CASE("closed-form Sigma_n and Hessian") {
  const HestonParams hp;
  const ModelSpec m = heston_model(hp);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Path p = simulate(hp, 20 + s, 1024);
    const Matrix sig = heston_sigma_n(p, hp);
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK(sig(1, r) == 0.0);
      CHECK(sig(r, 1) == 0.0);
      CHECK(sig(3, r) == 0.0);
      CHECK(sig(r, 3) == 0.0);
    }
    CHECK(max_abs(sigma_n(m, p, hp.theta()) - sig) <= 1e-8 * max_abs(sig));

    const Matrix h = heston_hessian(p, hp);
    CHECK(relative_error(hess_loglik_n(m, p, hp.theta()), h) <= 1e-10);
    // entry (1, 1) = -dt sum(1/Y) sigma2^2 G
    double inv = 0.0;
    for (std::size_t i = 0; i < 1024; ++i) inv += 1.0 / p.states(i, 0);
    const double g = 1.0 / (0.49 * 0.36 * 0.36);
    CHECK(h(0, 0) == doctest::Approx(-p.grid.dt() * inv * 0.36 * g).epsilon(1e-12));
    const SymmetricEigen e = sym_eigen(symmetrized(h));
    CHECK(e.eigenvalues.front() < 0.0);

    const auto r = mixed_normal_statistic(sig, h, heston_amle(subsample(p, 6)), heston_amle(p),
                                          p.grid.dt());
    CHECK(r.rank == 2);
    const Matrix proj = r.pinv_sqrt_sigma * sig * r.pinv_sqrt_sigma.transpose();
    double trace = 0.0;
    for (std::size_t i = 0; i < 4; ++i) trace += proj(i, i);
    CHECK(trace == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(max_abs(proj * proj - proj) <= 1e-9);
  }
}

TEST_CASE("identifiability denominator is nonnegative") {
  const HestonParams hp;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Path p = simulate(hp, 40 + s, 256);
    double sy = 0.0;
    double si = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
      sy += p.states(i, 0);
      si += 1.0 / p.states(i, 0);
    }
    const double dt = p.grid.dt();
    CHECK(dt * dt * sy * si - 1.0 > 0.0);
  }
}

TEST_CASE("fine-grid reference") {
  const HestonParams hp;
  const ModelSpec m = heston_model(hp);
  const Path p = simulate(hp, 60, 4096);
  const Vector fine = heston_mle_fine(p);
  CHECK(fine == heston_amle(subsample(p, 12)));
  for (double v : fine) CHECK(std::isfinite(v));
  const Vector proxy = mle_proxy(m, p).theta;
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(std::abs(proxy[j] - fine[j]) <= 1e-9 * std::max(1.0, std::abs(fine[j])));
  const Path odd{TimeGrid(1.0, 3), Matrix(4, 2, 0.5)};
  CHECK_THROWS_AS(heston_mle_fine(odd), InputError);
}

TEST_CASE("nonpositive Y is reported with its index") {
  const Path p = make_path(1.0, {{0.5, 1.0}, {0.4, 1.0}, {-0.1, 1.0}, {0.3, 1.0}});
  try {
    heston_sigma_n(p, HestonParams{});
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("grid index 2") != std::string::npos);
  }
}
