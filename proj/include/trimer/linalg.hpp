#pragma once

// Small dense real matrices and their eigenvalues (balancing, Householder
// reduction to Hessenberg form, Francis double-shift QR).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "trimer/errors.hpp"

namespace trimer {

/// Row-major square matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols) : n_(rows), cols_(cols), a_(rows * cols, 0.0) {
    if (rows == cols) cols_ = 0;
  }
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    a_.reserve(n_ * n_);
    for (const auto& r : rows) {
      if (r.size() != n_) throw UnsupportedSizeError("DenseMatrix initializer must be square");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return cols_ ? cols_ : n_; }
  bool square() const noexcept { return rows() == cols(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * cols() + j]; }

  /// Frobenius norm.
  double norm() const noexcept {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols(), rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix r(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t k = 0; k < x.cols(); ++k) {
        const double xik = x(i, k);
        if (xik == 0.0) continue;
        for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  friend DenseMatrix operator+(DenseMatrix x, const DenseMatrix& y) {
    for (std::size_t i = 0; i < x.a_.size(); ++i) x.a_[i] += y.a_[i];
    return x;
  }

 private:
  std::size_t n_ = 0;
  std::size_t cols_ = 0;  // 0 means square
  std::vector<double> a_;
};

inline constexpr std::size_t kMaxEigenDimension = 10;

namespace detail {

// Diagonal similarity scaling by powers of two so rows and columns have
// comparable norms.
inline void balance(DenseMatrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form (similarity transform).
inline void reduce_to_hessenberg(DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double scale = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
    if (scale == 0.0) continue;
    double sigma = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      sigma += v[i] * v[i];
    }
    const double alpha = std::copysign(std::sqrt(sigma), v[k + 1]);
    v[k + 1] += alpha;
    const double beta = alpha * v[k + 1];  // = |v|^2 / 2
    // A <- (I - v v^T / beta) A (I - v v^T / beta)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * a(i, j);
      const double f = dot / beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      const double f = dot / beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
// iteration (Martin, Peters & Wilkinson's hqr). Destroys h.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(DenseMatrix& h) {
  const int n = static_cast<int>(h.rows());
  std::vector<double> wr(n, 0.0);
  std::vector<double> wi(n, 0.0);
  auto H = [&h](int i, int j) -> double& {
    return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };

  double norm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) norm += std::abs(H(i, j));

  int en = n - 1;
  double t = 0.0;
  int itn = 30 * n;
  while (en >= 0) {
    int its = 0;
    const int na = en - 1;
    const int enm2 = na - 1;
    for (;;) {
      // look for a single small sub-diagonal element
      int l = en;
      for (; l > 0; --l) {
        double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
        if (s == 0.0) s = norm;
        if (s + std::abs(H(l, l - 1)) == s) break;
      }
      double x = H(en, en);
      if (l == en) {  // one root
        wr[en] = x + t;
        wi[en] = 0.0;
        en = na;
        break;
      }
      double y = H(na, na);
      double w = H(en, na) * H(na, en);
      if (l == na) {  // two roots
        const double p = (y - x) / 2.0;
        const double q = p * p + w;
        double zz = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          zz = p + std::copysign(zz, p);
          wr[na] = x + zz;
          wr[en] = zz != 0.0 ? x - w / zz : wr[na];
          wi[na] = 0.0;
          wi[en] = 0.0;
        } else {
          wr[na] = x + p;
          wr[en] = x + p;
          wi[na] = zz;
          wi[en] = -zz;
        }
        en = enm2;
        break;
      }
      if (itn == 0)
        throw EvaluationError("QR iteration did not converge within " +
                              std::to_string(30 * n) + " iterations");
      if (its == 10 || its == 20) {  // exceptional shift
        t += x;
        for (int i = 0; i <= en; ++i) H(i, i) -= x;
        const double s = std::abs(H(en, na)) + std::abs(H(na, enm2));
        x = 0.75 * s;
        y = x;
        w = -0.4375 * s * s;
      }
      ++its;
      --itn;

      // look for two consecutive small sub-diagonal elements
      int m = enm2;
      double p = 0.0;
      double q = 0.0;
      double r = 0.0;
      for (; m >= l; --m) {
        const double zz = H(m, m);
        const double rr = x - zz;
        const double ss = y - zz;
        p = (rr * ss - w) / H(m + 1, m) + H(m, m + 1);
        q = H(m + 1, m + 1) - zz - rr - ss;
        r = H(m + 2, m + 1);
        const double s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double tst1 =
            std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(zz) + std::abs(H(m + 1, m + 1)));
        const double tst2 = tst1 + std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r));
        if (tst2 == tst1) break;
      }
      for (int i = m + 2; i <= en; ++i) {
        H(i, i - 2) = 0.0;
        if (i != m + 2) H(i, i - 3) = 0.0;
      }

      // double QR step on rows l..en and columns m..en
      for (int k = m; k <= na; ++k) {
        const bool notlast = k != na;
        if (k != m) {
          p = H(k, k - 1);
          q = H(k + 1, k - 1);
          r = notlast ? H(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        const double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
        if (k != m) {
          H(k, k - 1) = -s * x;
        } else if (l != m) {
          H(k, k - 1) = -H(k, k - 1);
        }
        p += s;
        x = p / s;
        y = q / s;
        const double zz = r / s;
        q /= p;
        r /= p;
        const int jmax = std::min(en, k + 3);
        if (notlast) {
          for (int j = k; j < n; ++j) {
            const double pp = H(k, j) + q * H(k + 1, j) + r * H(k + 2, j);
            H(k, j) -= pp * x;
            H(k + 1, j) -= pp * y;
            H(k + 2, j) -= pp * zz;
          }
          for (int i = 0; i <= jmax; ++i) {
            const double pp = x * H(i, k) + y * H(i, k + 1) + zz * H(i, k + 2);
            H(i, k) -= pp;
            H(i, k + 1) -= pp * q;
            H(i, k + 2) -= pp * r;
          }
        } else {
          for (int j = k; j < n; ++j) {
            const double pp = H(k, j) + q * H(k + 1, j);
            H(k, j) -= pp * x;
            H(k + 1, j) -= pp * y;
          }
          for (int i = 0; i <= jmax; ++i) {
            const double pp = x * H(i, k) + y * H(i, k + 1);
            H(i, k) -= pp;
            H(i, k + 1) -= pp * q;
          }
        }
      }
    }
  }

  std::vector<std::complex<double>> mu(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mu[static_cast<std::size_t>(i)] = {wr[i], wi[i]};
  return mu;
}

}  // namespace detail

/// All eigenvalues of a real square matrix of dimension <= 10. Complex
/// eigenvalues come in adjacent conjugate pairs, positive imaginary part first.
inline std::vector<std::complex<double>> eigen_spectrum(const DenseMatrix& matrix) {
  if (!matrix.square()) throw UnsupportedSizeError("eigen_spectrum needs a square matrix");
  if (matrix.rows() > kMaxEigenDimension)
    throw UnsupportedSizeError("eigen_spectrum supports dimension <= 10, got " +
                               std::to_string(matrix.rows()));
  if (matrix.rows() == 0) return {};
  for (std::size_t i = 0; i < matrix.rows(); ++i)
    for (std::size_t j = 0; j < matrix.cols(); ++j)
      if (!std::isfinite(matrix(i, j))) throw EvaluationError("matrix has non-finite entries");
  DenseMatrix h = matrix;
  detail::balance(h);
  detail::reduce_to_hessenberg(h);
  return detail::hessenberg_eigenvalues(h);
}

/// |det(A - mu I)| by LU factorization with partial pivoting in complex arithmetic.
inline double characteristic_residual(const DenseMatrix& a, std::complex<double> mu) {
  const std::size_t n = a.rows();
  std::vector<std::complex<double>> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j) - (i == j ? mu : 0.0);
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
    if (m[piv * n + k] == 0.0) return 0.0;
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
    const auto pivot = m[k * n + k];
    det *= std::abs(pivot);
    for (std::size_t i = k + 1; i < n; ++i) {
      const auto f = m[i * n + k] / pivot;
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return det;
}

/// Orthonormal basis (as columns of an n x (n - r) matrix) of the orthogonal
/// complement of span(vectors), where r is their numerical rank.
inline DenseMatrix orthogonal_complement(const std::vector<std::vector<double>>& vectors,
                                         std::size_t n, double rank_tol = 1e-10) {
  std::vector<std::vector<double>> basis;
  auto orthogonalize = [&](std::vector<double> v) -> std::vector<double> {
    const double original = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double d = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * b[i];
      }
    }
    const double len = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (original == 0.0 || len <= rank_tol * std::max(original, 1.0)) return {};
    for (double& x : v) x /= len;
    return v;
  };
  for (const auto& v : vectors) {
    auto u = orthogonalize(v);
    if (!u.empty()) basis.push_back(std::move(u));
  }
  const std::size_t rank = basis.size();
  for (std::size_t k = 0; k < n && basis.size() < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    auto u = orthogonalize(std::move(e));
    if (!u.empty()) basis.push_back(std::move(u));
  }
  DenseMatrix q(n, n - rank);
  for (std::size_t c = rank; c < basis.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) q(i, c - rank) = basis[c][i];
  return q;
}

}  // namespace trimer
