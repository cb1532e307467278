#include "amle/numerics.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <numeric>
#include <string>

#include "amle/errors.hpp"

namespace amle {

// ---------------------------------------------------------------------------
// Matrix / Vector basics
// ---------------------------------------------------------------------------

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("Matrix: ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InputError("Matrix +=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InputError("Matrix -=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("Matrix *: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InputError("Matrix * vector: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector transpose_times(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw InputError("transpose_times: dimension mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

Vector operator+(Vector a, const Vector& b) {
  if (a.size() != b.size()) throw InputError("vector +: dimension mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Vector operator-(Vector a, const Vector& b) {
  if (a.size() != b.size()) throw InputError("vector -: dimension mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Vector operator*(double s, Vector a) {
  for (auto& v : a) v *= s;
  return a;
}

double max_abs(const Matrix& a) { return norm_inf(a.data()); }

double norm_inf(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

double asymmetry(const Matrix& a) {
  if (!a.is_square()) throw InputError("asymmetry: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

Matrix symmetrized(const Matrix& a) {
  if (!a.is_square()) throw InputError("symmetrized: matrix not square");
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    s(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

SymmetricEigen sym_eigen(const Matrix& a) {
  if (!a.is_square()) throw InputError("sym_eigen: matrix not square");
  const std::size_t n = a.rows();
  if (n > 64) throw InputError("sym_eigen: dimension " + std::to_string(n) + " exceeds 64");
  if (!all_finite(a)) throw InputError("sym_eigen: non-finite entry");
  const double scale = max_abs(a);
  if (asymmetry(a) > 1e-12 * scale)
    throw InputError("sym_eigen: matrix is not symmetric");

  Matrix m = symmetrized(a);
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_norm();
    if (off == 0.0 || off <= 1e-17 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        // Entries below rounding of both diagonal terms are zeroed outright.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(m(p, p)) + g == std::abs(m(p, p)) &&
            std::abs(m(q, q)) + g == std::abs(m(q, q))) {
          m(p, q) = 0.0;
          m(q, p) = 0.0;
          continue;
        }
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        m(p, p) -= t * apq;
        m(q, q) += t * apq;
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = m(r, p);
          const double arq = m(r, q);
          m(r, p) = arp - s * (arq + tau * arp);
          m(p, r) = m(r, p);
          m(r, q) = arq + s * (arp - tau * arq);
          m(q, r) = m(r, q);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m(i, i) > m(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.eigenvalues[c] = m(src, src);
    std::size_t argmax = 0;
    for (std::size_t r = 0; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(argmax, src))) argmax = r;
    const double sign = v(argmax, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = sign * v(r, src);
  }
  return out;
}

std::size_t numerical_rank(const SymmetricEigen& eig, double rank_tol) {
  if (eig.eigenvalues.empty()) return 0;
  const double lmax = eig.eigenvalues.front();
  if (!(lmax > 0.0)) return 0;
  return static_cast<std::size_t>(
      std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(),
                    [&](double l) { return l > rank_tol * lmax; }));
}

namespace {

// U diag(f(lambda)) U^T
Matrix spectral_map(const SymmetricEigen& eig, const Vector& mapped) {
  const std::size_t n = mapped.size();
  Matrix out(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    if (mapped[c] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = eig.eigenvectors(i, c) * mapped[c];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += ui * eig.eigenvectors(j, c);
    }
  }
  return symmetrized(out);
}

void require_psd(const SymmetricEigen& eig, double rank_tol, const char* who) {
  const double lmax = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
  const double lmin = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
  if (lmin < -rank_tol * std::max(lmax, 0.0) || (lmax <= 0.0 && lmin < 0.0))
    throw NotPsdError(std::string(who) + ": matrix is not positive semidefinite (eigenvalue " +
                      std::to_string(lmin) + ")");
}

}  // namespace

PinvSqrt pinv_sqrt_with_rank(const Matrix& a, double rank_tol) {
  const SymmetricEigen eig = sym_eigen(a);
  require_psd(eig, rank_tol, "pinv_sqrt");
  const std::size_t rank = numerical_rank(eig, rank_tol);
  Vector mapped(eig.eigenvalues.size(), 0.0);
  for (std::size_t i = 0; i < rank; ++i) mapped[i] = 1.0 / std::sqrt(eig.eigenvalues[i]);
  return {spectral_map(eig, mapped), rank};
}

Matrix psd_sqrt(const Matrix& a, double rank_tol) {
  const SymmetricEigen eig = sym_eigen(a);
  require_psd(eig, rank_tol, "psd_sqrt");
  Vector mapped(eig.eigenvalues.size(), 0.0);
  for (std::size_t i = 0; i < mapped.size(); ++i)
    mapped[i] = std::sqrt(std::max(eig.eigenvalues[i], 0.0));
  return spectral_map(eig, mapped);
}

// ---------------------------------------------------------------------------
// Chi-square
// ---------------------------------------------------------------------------

double chi2_cdf(double q, int df) {
  if (df <= 0) throw InputError("chi2_cdf: df must be positive");
  if (q <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * q);
}

double chi2_quantile(double p_tail, int df) {
  if (!(p_tail > 0.0 && p_tail < 1.0))
    throw InputError("chi2_quantile: p_tail must lie in (0, 1)");
  if (df <= 0) throw InputError("chi2_quantile: df must be a positive integer");

  // The upper tail Q(df/2, q/2) is decreasing in q; bisect on it directly so
  // that small p_tail keeps full relative precision.
  const auto upper_tail = [df](double q) { return boost::math::gamma_q(0.5 * df, 0.5 * q); };
  double lo = 0.0;
  double hi = df + 40.0 * std::sqrt(static_cast<double>(df));
  while (upper_tail(hi) > p_tail) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (upper_tail(mid) > p_tail)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Kronecker product, linear solve, finite differences
// ---------------------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

Vector solve_linear(Matrix a, Vector b) {
  if (!a.is_square()) throw InputError("solve_linear: matrix not square");
  if (a.rows() != b.size()) throw InputError("solve_linear: dimension mismatch");
  const std::size_t n = b.size();
  const double pivot_floor = 1e-14 * norm_inf(a);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (!(std::abs(a(piv, col)) > pivot_floor))
      throw SingularSystemError("solve_linear: singular system (pivot " +
                                std::to_string(a(piv, col)) + " in column " +
                                std::to_string(col) + ")");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
      b[r] -= factor * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

Matrix fd_jacobian(const VectorFunction& f, std::span<const double> x, double h_rel) {
  Vector probe(x.begin(), x.end());
  Matrix jac;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = h_rel * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const Vector fp = f(probe);
    probe[i] = x[i] - h;
    const Vector fm = f(probe);
    probe[i] = x[i];
    if (jac.empty()) jac = Matrix(fp.size(), x.size());
    for (std::size_t r = 0; r < fp.size(); ++r) jac(r, i) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return jac;
}

}  // namespace amle
