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

// Vectorized derivatives of f : R^d -> R^p and the calculus built on them.
//
// The r-th derivative of f at c is stored as p stacked blocks, block k
// holding the d^r partials of f_k in Kronecker-power order. From that
// layout follow
//
//   - evaluation of the r-th differential  {I_p (x) (u^T)^{(x)r}} D^r f(c),
//   - identification of derivatives from differential coefficients,
//   - multiplication by constants, the Leibniz rule for f (x) g and
//     Faa di Bruno's formula for g o f, each for arbitrary r.
//
// Functions enter as Jets: callables returning value and derivative vectors.

#ifndef VECDIFF_CALCULUS_HPP
#define VECDIFF_CALCULUS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vecdiff/errors.hpp"
#include "vecdiff/kron.hpp"
#include "vecdiff/symmetrizer.hpp"

namespace vecdiff {

/// D^{(x)r} f(c) for f : R^d -> R^p.
struct DerivVec {
  std::size_t d = 1;
  std::size_t p = 1;
  std::size_t r = 0;
  Vec point;
  Vec data;

  DerivVec() = default;
  DerivVec(std::size_t d_, std::size_t p_, std::size_t r_, Vec point_, Vec data_)
      : d(d_), p(p_), r(r_), point(std::move(point_)), data(std::move(data_)) {
    if (d == 0 || p == 0) throw ShapeError("DerivVec dimensions must be positive");
    if (data.size() != checked_mul(p, checked_pow(d, r))) {
      throw ShapeError("DerivVec data length " + std::to_string(data.size()) + " is not p*d^r = " +
                       std::to_string(p) + "*" + std::to_string(d) + "^" + std::to_string(r));
    }
    if (!point.empty() && point.size() != d) throw ShapeError("DerivVec point length is not d");
  }

  std::size_t block_size() const { return data.size() / p; }

  std::span<const double> block(std::size_t k) const {
    return std::span<const double>(data).subspan(k * block_size(), block_size());
  }
  std::span<double> block(std::size_t k) {
    return std::span<double>(data).subspan(k * block_size(), block_size());
  }

  /// max over blocks of |block - S_{d,r} block|
  double asymmetry() const {
    const Symmetrizer s(d, r);
    double dev = 0.0;
    for (std::size_t k = 0; k < p; ++k) dev = std::max(dev, s.asymmetry(block(k)));
    return dev;
  }
};

/// Value and derivatives of f : R^d -> R^p at any point.
///
/// The derivative callable receives the order (>= 1) and the point and
/// returns p*d^order numbers; the library checks the length.
class Jet {
 public:
  using ValueFn = std::function<Vec(std::span<const double>)>;
  using DerivFn = std::function<Vec(std::size_t, std::span<const double>)>;

  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  Jet(std::size_t d, std::size_t p, std::size_t max_order, ValueFn value, DerivFn deriv)
      : d_(d), p_(p), max_order_(max_order), value_(std::move(value)), deriv_(std::move(deriv)) {
    if (d == 0 || p == 0) throw ShapeError("Jet dimensions must be positive");
  }

  std::size_t d() const { return d_; }
  std::size_t p() const { return p_; }
  std::size_t max_order() const { return max_order_; }

  Vec value(std::span<const double> x) const {
    check_point(x);
    Vec v = value_(x);
    if (v.size() != p_) throw ShapeError("jet value has length " + std::to_string(v.size()));
    return v;
  }

  /// Order 0 returns the value as a DerivVec.
  DerivVec derivative(std::size_t order, std::span<const double> x) const {
    check_point(x);
    if (order > max_order_) {
      throw MissingOrder("jet supplies orders up to " + std::to_string(max_order_) +
                         ", order " + std::to_string(order) + " requested");
    }
    Vec data = order == 0 ? value_(x) : deriv_(order, x);
    return DerivVec(d_, p_, order, Vec(x.begin(), x.end()), std::move(data));
  }

  /// Stack scalar-valued jets into one vector-valued jet.
  static Jet stack(std::vector<Jet> parts) {
    if (parts.empty()) throw ShapeError("cannot stack zero jets");
    const std::size_t d = parts.front().d();
    std::size_t p = 0;
    std::size_t max_order = kUnbounded;
    for (const Jet& j : parts) {
      if (j.d() != d) throw ShapeError("stacked jets must share the domain dimension");
      p += j.p();
      max_order = std::min(max_order, j.max_order());
    }
    auto value = [parts](std::span<const double> x) {
      Vec out;
      for (const Jet& j : parts) {
        const Vec v = j.value(x);
        out.insert(out.end(), v.begin(), v.end());
      }
      return out;
    };
    auto deriv = [parts](std::size_t order, std::span<const double> x) {
      Vec out;
      for (const Jet& j : parts) {
        const DerivVec dv = j.derivative(order, x);
        out.insert(out.end(), dv.data.begin(), dv.data.end());
      }
      return out;
    };
    return Jet(d, p, max_order, std::move(value), std::move(deriv));
  }

 private:
  void check_point(std::span<const double> x) const {
    if (x.size() != d_) {
      throw ShapeError("jet expects a point of length " + std::to_string(d_) + ", got " +
                       std::to_string(x.size()));
    }
  }

  std::size_t d_;
  std::size_t p_;
  std::size_t max_order_;
  ValueFn value_;
  DerivFn deriv_;
};

// ---------------------------------------------------------------------------
// Differentials and identification
// ---------------------------------------------------------------------------

/// r-th differential d^r f(c; u) = {I_p (x) (u^T)^{(x)r}} D^r f(c).
inline Vec differential_eval(const DerivVec& dv, std::span<const double> u) {
  if (u.size() != dv.d) throw ShapeError("increment length is not d");
  const Vec upow = kron_power(u, dv.r);
  Vec out(dv.p);
  for (std::size_t k = 0; k < dv.p; ++k) out[k] = dot(dv.block(k), upow);
  return out;
}

/// Derivative identified from d^r f(c; u) = a^T u^{(x)r}: D^r f(c) = S_{d,r} a.
inline DerivVec identify_scalar(std::span<const double> a, std::size_t d, std::size_t r,
                                Vec point = {}) {
  if (a.size() != checked_pow(d, r)) throw ShapeError("identify_scalar: length is not d^r");
  return DerivVec(d, 1, r, std::move(point), symmetrize(d, r, a));
}

/// Vector-valued identification: (I_p (x) S_{d,r}) a, each block symmetrized.
inline DerivVec identify_vector(std::span<const double> a, std::size_t d, std::size_t p,
                                std::size_t r, Vec point = {}) {
  const std::size_t block = checked_pow(d, r);
  if (a.size() != checked_mul(p, block)) throw ShapeError("identify_vector: length is not p*d^r");
  const Symmetrizer s(d, r);
  Vec data;
  data.reserve(a.size());
  for (std::size_t k = 0; k < p; ++k) {
    const Vec b = s.apply(a.subspan(k * block, block));
    data.insert(data.end(), b.begin(), b.end());
  }
  return DerivVec(d, p, r, std::move(point), std::move(data));
}

/// Matrix form: d^r f(c; u) = A^T u^{(x)r} with A of order d^r x p gives vec(S A).
inline DerivVec identify_vector(const Mat& a, std::size_t d, std::size_t r, Vec point = {}) {
  if (a.rows() != checked_pow(d, r)) throw ShapeError("identify_vector: A must have d^r rows");
  return identify_vector(a.data(), d, a.cols(), r, std::move(point));
}

/// Iterative identification: if d{D^{r-1} f}(c; u) = B^T u with B of order
/// d x p d^{r-1}, then D^r f(c) = vec B. No symmetrization is applied.
inline DerivVec identify_iterative(const Mat& b, const DerivVec& prior) {
  const std::size_t r = prior.r + 1;
  if (r < 2) throw ShapeError("identify_iterative needs a prior derivative of order >= 1");
  if (b.rows() != prior.d || b.cols() != prior.data.size()) {
    throw ShapeError("identify_iterative: B must be d x p*d^(r-1)");
  }
  return DerivVec(prior.d, prior.p, r, prior.point, vec(b));
}

enum class ShapeKind { Scalar, Vector, Matrix };

inline ShapeKind parse_shape_kind(const std::string& s) {
  if (s == "scalar") return ShapeKind::Scalar;
  if (s == "vector") return ShapeKind::Vector;
  if (s == "matrix") return ShapeKind::Matrix;
  throw UnknownKind("unknown shape kind '" + s + "'");
}

/// Sizes of a function/variable pair: F in M_{p x q}, X in M_{c x d}.
/// Unused entries are ignored (a vector function uses p, a vector variable d).
struct ShapeDims {
  std::size_t p = 1;
  std::size_t q = 1;
  std::size_t c = 1;
  std::size_t d = 1;
};

/// Identification for any pairing of scalar/vector/matrix function and
/// variable. Matrices are vectorized first: the variable dimension becomes
/// c*d and the function contributes p*q blocks.
inline DerivVec table1_identify(ShapeKind function, ShapeKind variable, std::span<const double> a,
                                std::size_t r, const ShapeDims& dims) {
  std::size_t blocks = 1;
  switch (function) {
    case ShapeKind::Scalar: blocks = 1; break;
    case ShapeKind::Vector: blocks = dims.p; break;
    case ShapeKind::Matrix: blocks = checked_mul(dims.p, dims.q); break;
    default: throw UnknownKind("function kind");
  }
  std::size_t dim = 1;
  switch (variable) {
    case ShapeKind::Scalar: dim = 1; break;
    case ShapeKind::Vector: dim = dims.d; break;
    case ShapeKind::Matrix: dim = checked_mul(dims.c, dims.d); break;
    default: throw UnknownKind("variable kind");
  }
  return identify_vector(a, dim, blocks, r);
}

// ---------------------------------------------------------------------------
// Constant multiplication
// ---------------------------------------------------------------------------

/// D^r(a (x) f)(c) = a (x) D^r f(c); for scalar f this is D^r(a f).
inline DerivVec const_mul(std::span<const double> a, const DerivVec& df) {
  return DerivVec(df.d, checked_mul(a.size(), df.p), df.r, df.point, kron(a, df.data));
}

/// D^r(A f)(c) = (A (x) I_{d^r}) D^r f(c).
inline DerivVec const_mul(const Mat& a, const DerivVec& df) {
  if (a.cols() != df.p) throw ShapeError("const_mul: A must have p columns");
  const std::size_t block = df.block_size();
  Vec data(a.rows() * block, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      axpy(a(i, k), df.block(k), std::span<double>(data).subspan(i * block, block));
  return DerivVec(df.d, a.rows(), df.r, df.point, std::move(data));
}

inline DerivVec const_mul(std::span<const double> a, const Jet& f, std::size_t r,
                          std::span<const double> point) {
  return const_mul(a, f.derivative(r, point));
}

inline DerivVec const_mul(const Mat& a, const Jet& f, std::size_t r, std::span<const double> point) {
  return const_mul(a, f.derivative(r, point));
}

// ---------------------------------------------------------------------------
// Leibniz rule
// ---------------------------------------------------------------------------

enum class LeibnizRoute {
  /// vec{ vec^{-1} D^{r-j} f (x) vec^{-1} D^j g }
  InverseVec,
  /// (I_p (x) K_{q,d^{r-j}} (x) I_{d^j}) (D^{r-j} f (x) D^j g)
  Commutation,
};

/// D^r(f (x) g)(c) for f : R^d -> R^p and g : R^d -> R^q (the ordinary
/// product when p = q = 1).
inline DerivVec leibniz(const Jet& f, const Jet& g, std::size_t r, std::span<const double> point,
                        LeibnizRoute route = LeibnizRoute::InverseVec) {
  if (f.d() != g.d()) throw ShapeError("leibniz: jets must share the domain dimension");
  const std::size_t d = f.d();
  const std::size_t p = f.p();
  const std::size_t q = g.p();
  const std::size_t block = checked_pow(d, r);
  Vec sum(checked_mul(checked_mul(p, q), block), 0.0);
  for (std::size_t j = 0; j <= r; ++j) {
    const DerivVec df = f.derivative(r - j, point);
    const DerivVec dg = g.derivative(j, point);
    const double coef = static_cast<double>(binomial(r, j));
    Vec term;
    if (route == LeibnizRoute::InverseVec) {
      const Mat a = inv_vec(df.data, checked_pow(d, r - j), p);
      const Mat b = inv_vec(dg.data, checked_pow(d, j), q);
      term = vec(kron(a, b));
    } else {
      const Mat perm = kron(kron(Mat::identity(p), commutation_matrix(q, checked_pow(d, r - j))),
                            Mat::identity(checked_pow(d, j)));
      term = perm * kron(df.data, dg.data);
    }
    axpy(coef, term, sum);
  }
  return identify_vector(sum, d, p * q, r, Vec(point.begin(), point.end()));
}

// ---------------------------------------------------------------------------
// Faa di Bruno
// ---------------------------------------------------------------------------

/// One solution m of 1 m_1 + 2 m_2 + ... + r m_r = r.
struct DiophTerm {
  std::vector<std::size_t> m;
  std::size_t modulus = 0;     ///< |m| = sum m_l
  std::uint64_t pi = 0;        ///< r! / prod m_l! (l!)^{m_l}

  std::size_t order() const { return m.size(); }
};

namespace detail {

inline void diophantine_descend(std::size_t r, std::size_t level, std::size_t remaining,
                                std::vector<std::size_t>& m, std::vector<DiophTerm>& out) {
  if (level == 0) {
    if (remaining == 0) {
      DiophTerm t{m, 0, 0};
      std::uint64_t denom = 1;
      for (std::size_t l = 1; l <= r; ++l) {
        t.modulus += m[l - 1];
        for (std::size_t k = 0; k < m[l - 1]; ++k) denom *= factorial(l) * (k + 1);
      }
      t.pi = factorial(r) / denom;
      out.push_back(std::move(t));
    }
    return;
  }
  for (std::size_t c = 0; c * level <= remaining; ++c) {
    m[level - 1] = c;
    diophantine_descend(r, level - 1, remaining - c * level, m, out);
  }
  m[level - 1] = 0;
}

}  // namespace detail

/// All of J_r, ordered by decreasing |m| and then lexicographically in m.
/// J_0 holds the empty solution. Coefficients are exact; r is limited to 20.
inline std::vector<DiophTerm> enumerate_diophantine(std::size_t r) {
  if (r == 0) return {DiophTerm{{}, 0, 1}};
  if (r > 20) throw SizeOverflow("enumerate_diophantine supports r <= 20");
  std::vector<DiophTerm> out;
  std::vector<std::size_t> m(r, 0);
  detail::diophantine_descend(r, r, r, m, out);
  std::sort(out.begin(), out.end(), [](const DiophTerm& a, const DiophTerm& b) {
    if (a.modulus != b.modulus) return a.modulus > b.modulus;
    return a.m < b.m;
  });
  return out;
}

/// J_{k,r}: the members of J_r with |m| = k.
inline std::vector<DiophTerm> diophantine_with_modulus(std::size_t r, std::size_t k) {
  std::vector<DiophTerm> out;
  for (auto& t : enumerate_diophantine(r))
    if (t.modulus == k) out.push_back(std::move(t));
  return out;
}

namespace detail {

// sum over c in {0..p-1}^k of  G[c] * F_{l_1}[c_1] (x) ... (x) F_{l_k}[c_k],
// where F_l[c] is block c of D^l f and G is indexed with c_1 most significant.
inline Vec contract_chain(std::span<const double> g, const std::vector<const DerivVec*>& factors,
                          std::size_t t, std::size_t p) {
  if (t == factors.size()) return Vec{g[0]};
  const std::size_t stride = g.size() / p;
  Vec out;
  for (std::size_t c = 0; c < p; ++c) {
    const auto gslice = g.subspan(c * stride, stride);
    if (max_abs(gslice) == 0.0) continue;
    const Vec rest = contract_chain(gslice, factors, t + 1, p);
    const Vec piece = kron(factors[t]->block(c), rest);
    if (out.empty()) out.assign(piece.size(), 0.0);
    axpy(1.0, piece, out);
  }
  return out;
}

}  // namespace detail

/// D^r(g o f)(c) for f : R^d -> R^p and g : R^p -> R^q.
///
/// Sum over m in J_r of pi_m ([vec^{-1} D^{|m|} g(f(c))]^T (x) S_{d,r}) applied
/// to the chain (x)_l {D^l f(c)}^{(x)m_l}. The chain is contracted with the
/// p-indices of D^{|m|} g gathered in front of the d-indices, i.e. block j is
///   S_{d,r} sum_c [D^{|m|} g_j]_c  D^{l_1} f_{c_1} (x) ... (x) D^{l_k} f_{c_k}.
/// For p = 1 the gathering is the identity and this is the formula verbatim.
inline DerivVec faa_di_bruno(const Jet& f, const Jet& g, std::size_t r,
                             std::span<const double> point) {
  if (g.d() != f.p()) throw ShapeError("faa_di_bruno: g must be defined on R^p");
  const std::size_t d = f.d();
  const std::size_t p = f.p();
  const std::size_t q = g.p();
  const Vec fc = f.value(point);
  Vec pt(point.begin(), point.end());
  if (r == 0) return DerivVec(d, q, 0, pt, g.value(fc));

  std::map<std::size_t, DerivVec> fderiv;
  std::map<std::size_t, DerivVec> gderiv;
  auto f_at = [&](std::size_t l) -> const DerivVec& {
    auto it = fderiv.find(l);
    if (it == fderiv.end()) it = fderiv.emplace(l, f.derivative(l, point)).first;
    return it->second;
  };
  auto g_at = [&](std::size_t k) -> const DerivVec& {
    auto it = gderiv.find(k);
    if (it == gderiv.end()) it = gderiv.emplace(k, g.derivative(k, fc)).first;
    return it->second;
  };

  const Symmetrizer s(d, r);
  const std::size_t block = s.size();
  Vec out(checked_mul(q, block), 0.0);
  for (const DiophTerm& term : enumerate_diophantine(r)) {
    std::vector<const DerivVec*> factors;
    for (std::size_t l = 1; l <= r; ++l)
      for (std::size_t c = 0; c < term.m[l - 1]; ++c) factors.push_back(&f_at(l));
    const DerivVec& dg = g_at(term.modulus);
    for (std::size_t j = 0; j < q; ++j) {
      const Vec y = detail::contract_chain(dg.block(j), factors, 0, p);
      if (y.empty()) continue;
      axpy(static_cast<double>(term.pi), s.apply(y),
           std::span<double>(out).subspan(j * block, block));
    }
  }
  return DerivVec(d, q, r, std::move(pt), std::move(out));
}

}  // namespace vecdiff

#endif  // VECDIFF_CALCULUS_HPP
