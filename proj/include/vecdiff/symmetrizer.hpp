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

// The symmetrizer S_{d,r}, the multi-index <-> position bijection for
// vectors laid out as Kronecker powers, and compression of symmetric
// vectors to their unique entries.
//
// Multi-indices and positions are 1-based in the public interface, as in
// the usual mathematical notation: position_of({1,...,1}) == 1.

#ifndef VECDIFF_SYMMETRIZER_HPP
#define VECDIFF_SYMMETRIZER_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecdiff/errors.hpp"
#include "vecdiff/kron.hpp"

namespace vecdiff {

/// Exact binomial coefficient; throws SizeOverflow past 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // out * (n - k + i) is divisible by i; cancel the gcd first
    const std::uint64_t g = std::gcd(out, i);
    const std::uint64_t factor = (n - k + i) / (i / g);
    const std::uint64_t base = out / g;
    if (base > std::numeric_limits<std::uint64_t>::max() / factor) throw SizeOverflow("binomial overflow");
    out = base * factor;
  }
  return out;
}

inline std::uint64_t factorial(std::uint64_t n) {
  if (n > 20) throw SizeOverflow("factorial of " + std::to_string(n) + " exceeds 64 bits");
  std::uint64_t out = 1;
  for (std::uint64_t i = 2; i <= n; ++i) out *= i;
  return out;
}

/// (i_1, ..., i_r) with every i_j in {1, ..., d}; r = 0 is the empty tuple.
struct MultiIndex {
  std::size_t d = 1;
  std::vector<std::size_t> indices;

  std::size_t order() const { return indices.size(); }

  void validate() const {
    if (d == 0) throw RangeError("multi-index dimension must be positive");
    for (std::size_t i : indices)
      if (i < 1 || i > d)
        throw RangeError("index " + std::to_string(i) + " outside 1.." + std::to_string(d));
  }

  bool operator==(const MultiIndex&) const = default;
};

/// 1-based position p = 1 + sum_j (i_j - 1) d^(r-j) of the partial named by mi.
inline std::size_t position_of(const MultiIndex& mi) {
  mi.validate();
  checked_pow(mi.d, mi.order());
  std::size_t pos = 0;
  for (std::size_t i : mi.indices) pos = pos * mi.d + (i - 1);
  return pos + 1;
}

/// Inverse of position_of: base-d digits drawn from {1, ..., d}.
inline MultiIndex indices_of(std::size_t pos, std::size_t d, std::size_t r) {
  if (d == 0) throw RangeError("dimension must be positive");
  const std::size_t total = checked_pow(d, r);
  if (pos < 1 || pos > total) {
    throw RangeError("position " + std::to_string(pos) + " outside 1.." + std::to_string(total));
  }
  MultiIndex mi{d, std::vector<std::size_t>(r)};
  std::size_t rest = pos - 1;
  for (std::size_t j = r; j-- > 0;) {
    mi.indices[j] = rest % d + 1;
    rest /= d;
  }
  return mi;
}

namespace detail {

// 0-based digits of a 0-based position.
inline void digits_of(std::size_t pos, std::size_t d, std::span<std::size_t> out) {
  for (std::size_t j = out.size(); j-- > 0;) {
    out[j] = pos % d;
    pos /= d;
  }
}

inline std::size_t position_from_digits(std::span<const std::size_t> digits, std::size_t d) {
  std::size_t pos = 0;
  for (std::size_t i : digits) pos = pos * d + i;
  return pos;
}

// 0-based position of the sorted (canonical) rearrangement of every position.
inline std::vector<std::size_t> canonical_positions(std::size_t d, std::size_t r) {
  const std::size_t n = checked_pow(d, r);
  std::vector<std::size_t> canon(n);
  std::vector<std::size_t> digits(r);
  for (std::size_t pos = 0; pos < n; ++pos) {
    digits_of(pos, d, digits);
    std::sort(digits.begin(), digits.end());
    canon[pos] = position_from_digits(digits, d);
  }
  return canon;
}

}  // namespace detail

/// Sparse matrix as (row, col, value) triplets, 0-based, sorted by row then col.
struct SparseMatrix {
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Triplet> entries;

  Vec multiply(std::span<const double> x) const {
    if (x.size() != cols) throw ShapeError("sparse matrix-vector length mismatch");
    Vec out(rows, 0.0);
    for (const auto& t : entries) out[t.row] += t.value * x[t.col];
    return out;
  }

  Mat to_dense() const {
    Mat out(rows, cols);
    for (const auto& t : entries) out(t.row, t.col) += t.value;
    return out;
  }
};

/// Build S_{d,r} from its explicit form
///   S = (1/r!) sum_{i_1..i_r} sum_{sigma} (x)_l e_{i_l} e_{i_sigma(l)}^T,
/// counting permutations per column and scaling by 1/r! once.
inline SparseMatrix materialize_symmetrizer(std::size_t d, std::size_t r) {
  if (d == 0) throw RangeError("dimension must be positive");
  const std::size_t n = checked_pow(d, r);
  const double rfact = static_cast<double>(factorial(r));
  SparseMatrix s{n, n, {}};
  std::vector<std::size_t> digits(r);
  std::vector<std::size_t> perm(r);
  std::vector<std::size_t> permuted(r);
  std::vector<std::uint64_t> row_acc;
  std::vector<std::size_t> row_cols;
  for (std::size_t pos = 0; pos < n; ++pos) {
    detail::digits_of(pos, d, digits);
    std::iota(perm.begin(), perm.end(), 0);
    row_cols.clear();
    row_acc.clear();
    do {
      for (std::size_t l = 0; l < r; ++l) permuted[l] = digits[perm[l]];
      const std::size_t col = detail::position_from_digits(permuted, d);
      const auto it = std::find(row_cols.begin(), row_cols.end(), col);
      if (it == row_cols.end()) {
        row_cols.push_back(col);
        row_acc.push_back(1);
      } else {
        ++row_acc[static_cast<std::size_t>(it - row_cols.begin())];
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<std::size_t> order(row_cols.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return row_cols[a] < row_cols[b]; });
    for (std::size_t k : order) s.entries.push_back({pos, row_cols[k], static_cast<double>(row_acc[k]) / rfact});
  }
  return s;
}

enum class SymmetrizerForm { MatrixFree, Materialized };

/// Handle on S_{d,r}.
///
/// The matrix-free form averages each permutation orbit of positions once and
/// broadcasts the mean, which is exactly (1/r!) sum_sigma v[p(i_sigma)] because
/// every distinct rearrangement of a tuple with multiplicities r_1..r_k occurs
/// r_1!...r_k! times among the r! permutations. The materialized form keeps the
/// explicit sparse matrix and applies it by a sparse product.
class Symmetrizer {
 public:
  Symmetrizer(std::size_t d, std::size_t r, SymmetrizerForm form = SymmetrizerForm::MatrixFree)
      : d_(d), r_(r), form_(form) {
    if (d == 0) throw RangeError("dimension must be positive");
    size_ = checked_pow(d, r);
    canon_ = detail::canonical_positions(d, r);
    orbit_size_.assign(size_, 0);
    for (std::size_t c : canon_) ++orbit_size_[c];
    if (form == SymmetrizerForm::Materialized) matrix_ = materialize_symmetrizer(d, r);
  }

  std::size_t d() const { return d_; }
  std::size_t r() const { return r_; }
  std::size_t size() const { return size_; }
  SymmetrizerForm form() const { return form_; }

  Vec apply(std::span<const double> v) const {
    check_length(v.size());
    if (matrix_) return matrix_->multiply(v);
    Vec sums(size_, 0.0);
    for (std::size_t pos = 0; pos < size_; ++pos) sums[canon_[pos]] += v[pos];
    Vec out(size_);
    for (std::size_t pos = 0; pos < size_; ++pos) {
      const std::size_t c = canon_[pos];
      out[pos] = sums[c] / static_cast<double>(orbit_size_[c]);
    }
    return out;
  }

  /// Literal per-position sum over all r! permutations; O(d^r r!).
  Vec apply_by_permutations(std::span<const double> v) const {
    check_length(v.size());
    const double weight = 1.0 / static_cast<double>(factorial(r_));
    Vec out(size_, 0.0);
    std::vector<std::size_t> digits(r_), perm(r_), permuted(r_);
    for (std::size_t pos = 0; pos < size_; ++pos) {
      detail::digits_of(pos, d_, digits);
      std::iota(perm.begin(), perm.end(), 0);
      double acc = 0.0;
      do {
        for (std::size_t l = 0; l < r_; ++l) permuted[l] = digits[perm[l]];
        acc += v[detail::position_from_digits(permuted, d_)];
      } while (std::next_permutation(perm.begin(), perm.end()));
      out[pos] = weight * acc;
    }
    return out;
  }

  /// Explicit matrix; cached when the handle was built materialized.
  SparseMatrix matrix() const { return matrix_ ? *matrix_ : materialize_symmetrizer(d_, r_); }

  /// max |v - S v|
  double asymmetry(std::span<const double> v) const {
    const Vec sv = apply(v);
    return max_abs_diff(v, sv);
  }

  /// Number of positions sharing the orbit of a 0-based position.
  std::size_t orbit_size(std::size_t pos0) const { return orbit_size_[canon_.at(pos0)]; }

  /// 0-based position of the sorted representative of a 0-based position.
  std::size_t canonical_position(std::size_t pos0) const { return canon_.at(pos0); }

 private:
  void check_length(std::size_t n) const {
    if (n != size_) {
      throw ShapeError("symmetrizer S_{" + std::to_string(d_) + "," + std::to_string(r_) +
                       "} expects length " + std::to_string(size_) + ", got " + std::to_string(n));
    }
  }

  std::size_t d_;
  std::size_t r_;
  SymmetrizerForm form_;
  std::size_t size_ = 0;
  std::vector<std::size_t> canon_;
  std::vector<std::size_t> orbit_size_;
  std::optional<SparseMatrix> matrix_;
};

inline Vec apply_symmetrizer(const Symmetrizer& s, std::span<const double> v) { return s.apply(v); }

/// S_{d,r} v with a throwaway matrix-free handle.
inline Vec symmetrize(std::size_t d, std::size_t r, std::span<const double> v) {
  return Symmetrizer(d, r).apply(v);
}

/// The C(d+r-1, r) distinct entries of a symmetric d^r-vector.
///
/// canonical_list holds the non-decreasing multi-indices in lexicographic
/// order; multiplicities[k] is the orbit size r!/(r_1!...r_k!) of entry k.
class UniqueLayout {
 public:
  UniqueLayout(std::size_t d, std::size_t r) : d_(d), r_(r) {
    if (d == 0) throw RangeError("dimension must be positive");
    const std::size_t full = checked_pow(d, r);
    slot_.assign(full, 0);
    std::vector<std::size_t> digits(r, 0);
    // odometer over non-decreasing digit tuples
    while (true) {
      MultiIndex mi{d, std::vector<std::size_t>(r)};
      for (std::size_t j = 0; j < r; ++j) mi.indices[j] = digits[j] + 1;
      positions_.push_back(detail::position_from_digits(digits, d));
      canonical_.push_back(std::move(mi));
      std::size_t j = r;
      while (j > 0 && digits[j - 1] == d - 1) --j;
      if (j == 0) break;
      const std::size_t next = digits[j - 1] + 1;
      for (std::size_t k = j - 1; k < r; ++k) digits[k] = next;
    }
    std::vector<std::size_t> slot_of_canonical(full, 0);
    for (std::size_t k = 0; k < positions_.size(); ++k) slot_of_canonical[positions_[k]] = k;
    const std::vector<std::size_t> canon = detail::canonical_positions(d, r);
    multiplicities_.assign(positions_.size(), 0);
    for (std::size_t pos = 0; pos < full; ++pos) {
      slot_[pos] = slot_of_canonical[canon[pos]];
      ++multiplicities_[slot_[pos]];
    }
  }

  std::size_t d() const { return d_; }
  std::size_t r() const { return r_; }
  std::size_t count() const { return canonical_.size(); }
  std::size_t full_size() const { return slot_.size(); }
  const std::vector<MultiIndex>& canonical_list() const { return canonical_; }
  const std::vector<std::size_t>& multiplicities() const { return multiplicities_; }
  /// 0-based full-vector position of canonical entry k.
  std::size_t position(std::size_t k) const { return positions_.at(k); }
  /// Unique slot that a 0-based full-vector position maps to.
  std::size_t slot(std::size_t pos0) const { return slot_.at(pos0); }

 private:
  std::size_t d_;
  std::size_t r_;
  std::vector<MultiIndex> canonical_;
  std::vector<std::size_t> positions_;
  std::vector<std::size_t> multiplicities_;
  std::vector<std::size_t> slot_;
};

/// Relative tolerance used by compress_unique.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Keep one entry per orbit. Throws NonSymmetricInput when v deviates from
/// S v by more than tol * max|v|.
inline Vec compress_unique(std::span<const double> v, const UniqueLayout& layout,
                           double tol = kSymmetryTolerance) {
  if (v.size() != layout.full_size()) throw ShapeError("compress_unique: length is not d^r");
  const double dev = Symmetrizer(layout.d(), layout.r()).asymmetry(v);
  if (dev > tol * max_abs(v)) {
    throw NonSymmetricInput("vector deviates from its symmetrization by " + std::to_string(dev));
  }
  Vec out(layout.count());
  for (std::size_t k = 0; k < layout.count(); ++k) out[k] = v[layout.position(k)];
  return out;
}

/// Broadcast unique entries over their orbits.
inline Vec expand_unique(std::span<const double> u, const UniqueLayout& layout) {
  if (u.size() != layout.count()) throw ShapeError("expand_unique: length is not the unique count");
  Vec out(layout.full_size());
  for (std::size_t pos = 0; pos < out.size(); ++pos) out[pos] = u[layout.slot(pos)];
  return out;
}

}  // namespace vecdiff

#endif  // VECDIFF_SYMMETRIZER_HPP
