#include <doctest.h>

#include <cmath>

#include "amle/errors.hpp"
#include "amle/numerics.hpp"
#include "test_models.hpp"

using namespace amle;
using amle::testing::random_matrix;
using amle::testing::random_orthogonal;
using amle::testing::random_symmetric;

namespace {

Matrix reconstruct(const SymmetricEigen& e) {
  return e.eigenvectors * Matrix::diagonal(e.eigenvalues) * e.eigenvectors.transpose();
}

double det3(const Matrix& a, std::size_t skip_r, std::size_t skip_c) {
  std::size_t r[3];
  std::size_t c[3];
  for (std::size_t i = 0, n = 0; i < 4; ++i)
    if (i != skip_r) r[n++] = i;
  for (std::size_t j = 0, n = 0; j < 4; ++j)
    if (j != skip_c) c[n++] = j;
  auto m = [&](int i, int j) { return a(r[i], c[j]); };
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// x = adj(A) b / det(A) by cofactor expansion.
Vector cramer4(const Matrix& a, const Vector& b) {
  double det = 0.0;
  for (std::size_t j = 0; j < 4; ++j) det += ((j % 2) ? -1.0 : 1.0) * a(0, j) * det3(a, 0, j);
  Vector x(4, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      x[i] += (((i + j) % 2) ? -1.0 : 1.0) * det3(a, j, i) * b[j];
  for (auto& v : x) v /= det;
  return x;
}

}  // namespace

TEST_CASE("sym_eigen of a diagonal matrix") {
  const auto e = sym_eigen(Matrix{{1.0, 0.0}, {0.0, 3.0}});
  CHECK(e.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eigen of the swap matrix") {
  const auto e = sym_eigen(Matrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(-1.0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(s));
  CHECK(e.eigenvectors(0, 0) * e.eigenvectors(1, 0) == doctest::Approx(0.5));
  CHECK(e.eigenvectors(0, 1) * e.eigenvectors(1, 1) == doctest::Approx(-0.5));
}

TEST_CASE("sym_eigen recovers a planted spectrum") {
  NoiseSource noise(11, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix q = random_orthogonal(4, noise);
    const Matrix a = q * Matrix::diagonal(Vector{5.0, 2.0, 1.0, 0.0}) * q.transpose();
    const auto e = sym_eigen(symmetrized(a));
    const Vector expected{5.0, 2.0, 1.0, 0.0};
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(e.eigenvalues[i] - expected[i]) <= 1e-10);
  }
}

TEST_CASE("sym_eigen reconstruction and orthogonality over random matrices") {
  NoiseSource noise(12, 0);
  for (std::size_t n : {2u, 3u, 4u, 8u}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Matrix a = random_symmetric(n, noise);
      const auto e = sym_eigen(a);
      CHECK(norm_inf(a - reconstruct(e)) <= 1e-10 * std::max(1.0, norm_inf(a)));
      CHECK(norm_inf(e.eigenvectors.transpose() * e.eigenvectors - Matrix::identity(n)) <= 1e-10);
      for (std::size_t i = 1; i < n; ++i) CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i]);
    }
  }
}

TEST_CASE("sym_eigen is deterministic and rejects asymmetric input") {
  NoiseSource noise(13, 0);
  const Matrix a = random_symmetric(5, noise);
  const auto e1 = sym_eigen(a);
  const auto e2 = sym_eigen(a);
  CHECK(e1.eigenvalues == e2.eigenvalues);
  CHECK(e1.eigenvectors == e2.eigenvectors);
  CHECK_THROWS_AS(sym_eigen(Matrix{{1.0, 2.0}, {0.0, 1.0}}), InputError);
  CHECK_THROWS_AS(sym_eigen(Matrix(2, 3)), InputError);
}

TEST_CASE("pinv_sqrt basic cases") {
  CHECK(max_abs(pinv_sqrt(Matrix::identity(3)) - Matrix::identity(3)) <= 1e-14);
  const auto r = pinv_sqrt_with_rank(Matrix{{4.0, 0.0}, {0.0, 0.0}});
  CHECK(r.rank == 1);
  CHECK(max_abs(r.root - Matrix{{0.5, 0.0}, {0.0, 0.0}}) <= 1e-14);
  CHECK_THROWS_AS(pinv_sqrt(Matrix{{1.0, 0.0}, {0.0, -0.5}}), NotPsdError);
  CHECK(pinv_sqrt_with_rank(Matrix(2, 2)).rank == 0);
}

TEST_CASE("pinv_sqrt gives a projector onto the range") {
  NoiseSource noise(14, 0);
  for (std::size_t n : {2u, 3u, 4u, 6u}) {
    for (std::size_t rank = 0; rank <= n; ++rank) {
      const Matrix q = random_orthogonal(n, noise);
      Vector diag(n, 0.0);
      for (std::size_t i = 0; i < rank; ++i) diag[i] = 0.1 + 10.0 * noise.uniform();
      const Matrix a = symmetrized(q * Matrix::diagonal(diag) * q.transpose());
      const auto r = pinv_sqrt_with_rank(a);
      const Matrix& b = r.root;
      CHECK(asymmetry(b) <= 1e-12 * std::max(1.0, max_abs(b)));
      const Matrix p = b * a * b.transpose();
      CHECK(max_abs(p * p - p) <= 1e-9);
      CHECK(r.rank == rank);
      double trace = 0.0;
      for (std::size_t i = 0; i < n; ++i) trace += p(i, i);
      CHECK(trace == doctest::Approx(static_cast<double>(rank)).epsilon(1e-9));
    }
  }
}

TEST_CASE("psd_sqrt squares back") {
  NoiseSource noise(15, 0);
  const Matrix g = random_matrix(4, 4, noise);
  const Matrix a = symmetrized(g * g.transpose());
  const Matrix r = psd_sqrt(a);
  CHECK(max_abs(r * r - a) <= 1e-10 * max_abs(a));
}

TEST_CASE("chi2_quantile closed forms") {
  CHECK(chi2_quantile(0.05, 2) == doctest::Approx(5.991465).epsilon(1e-7));
  CHECK(chi2_quantile(0.025, 2) == doctest::Approx(7.377759).epsilon(1e-7));
  CHECK(chi2_quantile(0.05, 1) == doctest::Approx(3.841459).epsilon(1e-7));
  for (double p : {0.5, 0.1, 0.05, 0.025, 0.01})
    CHECK(std::abs(chi2_quantile(p, 2) + 2.0 * std::log(p)) <= 1e-9);
  // df = 1: the quantile is the square of the two-sided normal quantile.
  CHECK(std::abs(chi2_quantile(0.05, 1) - 1.959963984540054 * 1.959963984540054) <= 1e-9);
}

TEST_CASE("chi2_quantile inverts chi2_cdf") {
  for (int df : {1, 2, 3, 4, 10, 50})
    for (double p : {0.9, 0.5, 0.05, 0.001}) {
      const double q = chi2_quantile(p, df);
      CHECK(std::abs(chi2_cdf(q, df) - (1.0 - p)) <= 1e-10);
    }
  CHECK_THROWS_AS(chi2_quantile(0.0, 2), InputError);
  CHECK_THROWS_AS(chi2_quantile(1.0, 2), InputError);
  CHECK_THROWS_AS(chi2_quantile(0.05, 0), InputError);
}

TEST_CASE("kron") {
  const Matrix b{{1.0, 2.0}, {3.0, 4.0}};
  const Matrix ib = kron(Matrix::identity(2), b);
  CHECK(ib == Matrix{{1, 2, 0, 0}, {3, 4, 0, 0}, {0, 0, 1, 2}, {0, 0, 3, 4}});
  const Matrix k = kron(b, Matrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(k == Matrix{{0, 1, 0, 2}, {1, 0, 2, 0}, {0, 3, 0, 4}, {3, 0, 4, 0}});

  NoiseSource noise(16, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(2, 3, noise);
    const Matrix bb = random_matrix(3, 2, noise);
    const Matrix c = random_matrix(3, 2, noise);
    const Matrix d = random_matrix(2, 4, noise);
    CHECK(max_abs(kron(a, bb) * kron(c, d) - kron(a * c, bb * d)) <= 1e-10);
  }
}

TEST_CASE("solve_linear") {
  CHECK(solve_linear(Matrix::identity(3), Vector{1.0, -2.0, 3.0}) == Vector{1.0, -2.0, 3.0});
  const Vector x = solve_linear(Matrix{{2.0, 0.0}, {0.0, 4.0}}, Vector{2.0, 8.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));

  NoiseSource noise(17, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(4, 4, noise) + 4.0 * Matrix::identity(4);
    const Vector b = standard_normals(noise, 4);
    const Vector got = solve_linear(a, b);
    const Vector want = cramer4(a, b);
    CHECK(norm_inf(got - want) <= 1e-9 * std::max(1.0, norm_inf(want)));
    CHECK(norm_inf(a * got - b) <= 1e-9 * (norm_inf(a) * norm_inf(got) + norm_inf(b)));
  }
  CHECK_THROWS_AS(solve_linear(Matrix{{1.0, 2.0}, {2.0, 4.0}}, Vector{1.0, 1.0}),
                  SingularSystemError);
}

TEST_CASE("fd_jacobian") {
  const VectorFunction square = [](std::span<const double> x) { return Vector{x[0] * x[0]}; };
  const Vector at{3.0};
  CHECK(std::abs(fd_jacobian(square, at, 1e-5)(0, 0) - 6.0) <= 1e-8);

  const Matrix m{{1.0, -2.0, 0.5}, {3.0, 0.0, 4.0}};
  const VectorFunction linear = [&](std::span<const double> x) { return m * x; };
  const Vector x0{0.3, -7.0, 12.0};
  CHECK(max_abs(fd_jacobian(linear, x0, 1e-6) - m) <= 1e-8);
}
