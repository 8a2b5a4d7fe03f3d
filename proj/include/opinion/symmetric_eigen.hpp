#pragma once

// Dense symmetric eigenvalue solvers with no external numeric dependency.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "opinion/errors.hpp"

namespace opinion {

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T* out = c.row(i);
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        const T* bk = b.row(k);
        for (std::size_t j = 0; j < b.cols_; ++j) out[j] += aik * bk[j];
      }
    }
    return c;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Only the upper triangle is read.
template <class T>
std::vector<T> jacobi_eigenvalues(DenseMatrix<T> a, int max_sweeps = 100) {
  const std::size_t n = a.rows();
  std::vector<T> d(n), b(n), z(n, T{});
  for (std::size_t i = 0; i < n; ++i) b[i] = d[i] = a(i, i);

  auto rotate = [&a](std::size_t i, std::size_t j, std::size_t k, std::size_t l, T s, T tau) {
    T g = a(i, j);
    T h = a(k, l);
    a(i, j) = g - s * (h + g * tau);
    a(k, l) = h + s * (g - h * tau);
  };

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    T off = 0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == T{}) {
      std::sort(d.begin(), d.end());
      return d;
    }
    const T thresh = sweep < 4 ? T(0.2) * off / static_cast<T>(n * n) : T{};
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        const T g = 100 * std::abs(apq);
        if (sweep > 4 && std::abs(d[p]) + g == std::abs(d[p]) && std::abs(d[q]) + g == std::abs(d[q])) {
          a(p, q) = 0;
          continue;
        }
        if (std::abs(apq) <= thresh) continue;
        T h = d[q] - d[p];
        T t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          T theta = T(0.5) * h / apq;
          t = 1 / (std::abs(theta) + std::sqrt(1 + theta * theta));
          if (theta < 0) t = -t;
        }
        const T c = 1 / std::sqrt(1 + t * t);
        const T s = t * c;
        const T tau = s / (1 + c);
        h = t * apq;
        z[p] -= h;
        z[q] += h;
        d[p] -= h;
        d[q] += h;
        a(p, q) = 0;
        for (std::size_t j = 0; j < p; ++j) rotate(j, p, j, q, s, tau);
        for (std::size_t j = p + 1; j < q; ++j) rotate(p, j, j, q, s, tau);
        for (std::size_t j = q + 1; j < n; ++j) rotate(p, j, q, j, s, tau);
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0;
    }
  }
  throw InvariantError("Jacobi eigensolver did not converge");
}

/// Eigenvalues of a symmetric matrix by Householder reduction to tridiagonal
/// form followed by implicit QL, ascending. Reads the lower triangle.
template <class T>
std::vector<T> tridiagonal_ql_eigenvalues(DenseMatrix<T> a) {
  const long n = static_cast<long>(a.rows());
  std::vector<T> d(n), e(n);
  if (n == 0) return d;

  for (long i = n - 1; i > 0; --i) {
    const long l = i - 1;
    T h = 0;
    if (l > 0) {
      T scale = 0;
      for (long k = 0; k < i; ++k) scale += std::abs(a(i, k));
      if (scale == T{}) {
        e[i] = a(i, l);
      } else {
        for (long k = 0; k < i; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        T f = a(i, l);
        T g = f >= 0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0;
        for (long j = 0; j < i; ++j) {
          g = 0;
          for (long k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (long k = j + 1; k < i; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const T hh = f / (h + h);
        for (long j = 0; j < i; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (long k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  for (long i = 0; i < n; ++i) d[i] = a(i, i);

  for (long i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0;
  const T eps = std::numeric_limits<T>::epsilon();
  for (long l = 0; l < n; ++l) {
    int iter = 0;
    long m;
    do {
      for (m = l; m < n - 1; ++m) {
        T dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw InvariantError("QL eigensolver did not converge");
        T g = (d[l + 1] - d[l]) / (2 * e[l]);
        T r = std::hypot(g, T(1));
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        T s = 1, c = 1, p = 0;
        long i;
        for (i = m - 1; i >= l; --i) {
          T f = s * e[i];
          T b = c * e[i];
          e[i + 1] = (r = std::hypot(f, g));
          if (r == T{}) {
            d[i + 1] -= p;
            e[m] = 0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
        }
        if (r == T{} && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

inline constexpr std::size_t kJacobiMaxDimension = 256;

/// Jacobi for small matrices, Householder + QL beyond kJacobiMaxDimension.
template <class T>
std::vector<T> symmetric_eigenvalues(const DenseMatrix<T>& a) {
  if (a.rows() <= kJacobiMaxDimension) return jacobi_eigenvalues(a);
  return tridiagonal_ql_eigenvalues(a);
}

}  // namespace opinion
