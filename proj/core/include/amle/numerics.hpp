#pragma once

#include <cstddef>
#include <functional>

#include "amle/matrix.hpp"

namespace amle {

/// Default relative tolerance for numerical rank decisions: an eigenvalue
/// counts as zero when it is at most this fraction of the largest one.
inline constexpr double kDefaultRankTol = 1e-10;

/// Symmetric eigendecomposition A = U diag(lambda) U^T, eigenvalues sorted
/// in descending order, column i of `eigenvectors` paired with eigenvalue i.
struct SymmetricEigen {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Cyclic Jacobi rotations. Rejects input whose asymmetry exceeds 1e-12
/// relative to max|A|, and matrices larger than 64 x 64. Eigenvector signs
/// are normalized so that the largest-magnitude entry of each column is
/// positive, which makes the output a deterministic function of A.
SymmetricEigen sym_eigen(const Matrix& a);

/// Number of eigenvalues above rank_tol * max(eigenvalues).
std::size_t numerical_rank(const SymmetricEigen& eig, double rank_tol = kDefaultRankTol);

struct PinvSqrt {
  Matrix root;       // U D~ U^T
  std::size_t rank;  // number of retained eigenvalues
};

/// Generalized inverse of the symmetric square root of a PSD matrix.
/// Eigenvalues above rank_tol * lambda_max are mapped to 1/sqrt(lambda),
/// the rest to zero. Negative eigenvalues down to -rank_tol * lambda_max are
/// treated as rounding noise; anything below throws NotPsdError.
PinvSqrt pinv_sqrt_with_rank(const Matrix& a, double rank_tol = kDefaultRankTol);
inline Matrix pinv_sqrt(const Matrix& a, double rank_tol = kDefaultRankTol) {
  return pinv_sqrt_with_rank(a, rank_tol).root;
}

/// Symmetric PSD square root U sqrt(D) U^T (negative rounding noise clamped).
Matrix psd_sqrt(const Matrix& a, double rank_tol = kDefaultRankTol);

/// Upper (1 - p_tail) quantile of the chi-square distribution with df degrees
/// of freedom, by bisection on the regularized incomplete gamma function.
double chi2_quantile(double p_tail, int df);

/// P(chi2(df) <= q).
double chi2_cdf(double q, int df);

Matrix kron(const Matrix& a, const Matrix& b);

/// Gaussian elimination with partial pivoting. Throws SingularSystemError
/// when a pivot falls below 1e-14 * ||A||_inf.
Vector solve_linear(Matrix a, Vector b);

using VectorFunction = std::function<Vector(std::span<const double>)>;

/// Central-difference Jacobian, step h_i = h_rel * max(1, |x_i|).
/// Row r is output component r, column i is input coordinate i.
Matrix fd_jacobian(const VectorFunction& f, std::span<const double> x, double h_rel);

}  // namespace amle
