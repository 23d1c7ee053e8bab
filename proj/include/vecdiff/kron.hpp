// Copyright 2026 The vecdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense Kronecker algebra: column-major matrices, Kronecker products and
// powers, vec / inverse vec and commutation matrices.
//
// Vectors are plain std::vector<double>; a column vector and vec of a
// matrix share the same memory layout, so vec() is a copy of the storage.

#ifndef VECDIFF_KRON_HPP
#define VECDIFF_KRON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vecdiff/errors.hpp"

namespace vecdiff {

using Vec = std::vector<double>;

/// Largest number of entries any constructed object may hold (2^26).
inline constexpr std::size_t kMaxEntries = std::size_t{1} << 26;

/// a * b, throwing SizeOverflow when it exceeds kMaxEntries.
inline std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kMaxEntries / a) {
    throw SizeOverflow("size " + std::to_string(a) + " x " + std::to_string(b) +
                       " exceeds the entry limit");
  }
  return a * b;
}

/// base^exp with the same guard as checked_mul.
inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

/// Dense real matrix, column-major.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(checked_mul(rows, cols), 0.0) {}
  Mat(std::size_t rows, std::size_t cols, Vec col_major)
      : rows_(rows), cols_(cols), data_(std::move(col_major)) {
    if (data_.size() != checked_mul(rows, cols)) {
      throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
  }

  /// Build from a row-wise literal: {{1, 2}, {3, 4}}.
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    Mat out(m, n);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n) throw ShapeError("ragged row literal");
      std::size_t j = 0;
      for (double v : row) out(i, j++) = v;
      ++i;
    }
    return out;
  }

  static Mat identity(std::size_t n) {
    Mat out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
  }

  static Mat column(std::span<const double> v) {
    return Mat(v.size(), 1, Vec(v.begin(), v.end()));
  }

  static Mat row(std::span<const double> v) {
    return Mat(1, v.size(), Vec(v.begin(), v.end()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const Vec& values() const { return data_; }

  std::span<const double> col(std::size_t j) const {
    return std::span<const double>(data_).subspan(j * rows_, rows_);
  }

  Mat transpose() const {
    Mat out(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
    return out;
  }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

inline Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matrix product " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                     "x" + std::to_string(b.cols()));
  }
  Mat out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bkj;
    }
  }
  return out;
}

inline Vec operator*(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ShapeError("matrix-vector length mismatch");
  Vec out(a.rows(), 0.0);
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double xk = x[k];
    if (xk == 0.0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] += a(i, k) * xk;
  }
  return out;
}

inline Vec operator*(const Mat& a, const Vec& x) { return a * std::span<const double>(x); }

inline Mat operator+(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix sum shape mismatch");
  Mat out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] += b.data()[k];
  return out;
}

inline Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix difference shape mismatch");
  Mat out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] -= b.data()[k];
  return out;
}

inline Mat operator*(double s, const Mat& a) {
  Mat out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot product length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ShapeError("axpy length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec scaled(double s, std::span<const double> x) {
  Vec out(x.begin(), x.end());
  for (double& v : out) v *= s;
  return out;
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("comparison length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("comparison shape mismatch");
  return max_abs_diff(a.data(), b.data());
}

/// max|a - b| / max|b|, or the absolute deviation when b vanishes.
inline double rel_max_diff(std::span<const double> a, std::span<const double> b) {
  const double scale = max_abs(b);
  const double dev = max_abs_diff(a, b);
  return scale > 0.0 ? dev / scale : dev;
}

// ---------------------------------------------------------------------------
// Kronecker products
// ---------------------------------------------------------------------------

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
inline Mat kron(const Mat& a, const Mat& b) {
  const std::size_t rows = checked_mul(a.rows(), b.rows());
  const std::size_t cols = checked_mul(a.cols(), b.cols());
  checked_mul(rows, cols);
  Mat out(rows, cols);
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t l = 0; l < b.cols(); ++l)
        for (std::size_t k = 0; k < b.rows(); ++k)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// Kronecker product of two column vectors.
inline Vec kron(std::span<const double> a, std::span<const double> b) {
  Vec out(checked_mul(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) out[i * b.size() + k] = a[i] * b[k];
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  return kron(std::span<const double>(a), std::span<const double>(b));
}

/// A^{(x)r}; r = 0 yields the 1x1 matrix [1].
inline Mat kron_power(const Mat& a, std::size_t r) {
  if (r == 0) return Mat(1, 1, Vec{1.0});
  Mat out = a;
  for (std::size_t i = 1; i < r; ++i) out = kron(out, a);
  return out;
}

/// x^{(x)r} for a column vector; r = 0 yields (1).
inline Vec kron_power(std::span<const double> x, std::size_t r) {
  Vec out{1.0};
  for (std::size_t i = 0; i < r; ++i) out = kron(std::span<const double>(out), x);
  return out;
}

/// A^{(x)r} v without forming A^{(x)r}: one mode product per factor.
///
/// v has length n^r for A of order m x n; the result has length m^r. Index
/// convention matches kron(): the first factor is the most significant digit.
inline Vec kron_power_apply(const Mat& a, std::size_t r, std::span<const double> v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (v.size() != checked_pow(n, r)) throw ShapeError("kron_power_apply: length is not n^r");
  checked_pow(m, r);
  Vec cur(v.begin(), v.end());
  // Before processing mode t the tensor has shape m^t x n x n^(r-t-1).
  for (std::size_t t = 0; t < r; ++t) {
    const std::size_t left = checked_pow(m, t);
    const std::size_t right = checked_pow(n, r - t - 1);
    Vec next(left * m * right, 0.0);
    for (std::size_t l = 0; l < left; ++l)
      for (std::size_t k = 0; k < n; ++k) {
        const double* src = cur.data() + (l * n + k) * right;
        for (std::size_t i = 0; i < m; ++i) {
          const double aik = a(i, k);
          if (aik == 0.0) continue;
          double* dst = next.data() + (l * m + i) * right;
          for (std::size_t q = 0; q < right; ++q) dst[q] += aik * src[q];
        }
      }
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// vec and friends
// ---------------------------------------------------------------------------

/// Stack the columns of a.
inline Vec vec(const Mat& a) { return a.values(); }

/// Inverse of vec: reshape x (length m*n) into an m x n matrix.
inline Mat inv_vec(std::span<const double> x, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0 || x.size() != checked_mul(m, n)) {
    throw ShapeError("inv_vec: length " + std::to_string(x.size()) + " is not " +
                     std::to_string(m) + "*" + std::to_string(n));
  }
  return Mat(m, n, Vec(x.begin(), x.end()));
}

/// Commutation matrix K_{m,n}: K_{m,n} vec(A) = vec(A^T) for A of order m x n.
inline Mat commutation_matrix(std::size_t m, std::size_t n) {
  const std::size_t mn = checked_mul(m, n);
  checked_mul(mn, mn);
  Mat k(mn, mn);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i * n + j, j * m + i) = 1.0;
  return k;
}

}  // namespace vecdiff

#endif  // VECDIFF_KRON_HPP
