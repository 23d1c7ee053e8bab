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

// Vector Hermite polynomials, derivatives of the N(0, Sigma) density and
// the moment <-> cumulant conversions.
//
// Three independent routes give D^{(x)r} phi_Sigma:
//   gaussian_deriv_hermite   (-1)^r (Sigma^-1)^{(x)r} H_r(x; Sigma) phi(x)
//   gaussian_deriv_fdb       Faa di Bruno on exp o (-x^T Sigma^-1 x / 2)
//   gaussian_deriv_iterative closed forms for r <= 3, the last one built by
//                            iterative identification of d{D^2 phi}

#ifndef VECDIFF_GAUSSIAN_HPP
#define VECDIFF_GAUSSIAN_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "vecdiff/calculus.hpp"
#include "vecdiff/errors.hpp"
#include "vecdiff/kron.hpp"
#include "vecdiff/symmetrizer.hpp"

namespace vecdiff {

/// Symmetric positive-definite matrix with its inverse, determinant and
/// symmetric square root computed once at construction.
class SpdMatrix {
 public:
  explicit SpdMatrix(Mat m) : m_(std::move(m)) {
    const std::size_t d = m_.rows();
    if (d == 0 || m_.cols() != d) throw ShapeError("SPD matrix must be square and non-empty");
    const double scale = std::max(1.0, max_abs(m_.data()));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(m_(i, j) - m_(j, i)) > 1e-12 * scale)
          throw DomainError("matrix is not symmetric");
    for (double v : m_.data())
      if (!std::isfinite(v)) throw DomainError("matrix has non-finite entries");

    const Eigen::Map<const Eigen::MatrixXd> em(m_.data().data(), d, d);
    const Eigen::LLT<Eigen::MatrixXd> llt(em);
    if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive definite");
    double logdet = 0.0;
    const Eigen::MatrixXd lmat = llt.matrixL();
    for (std::size_t i = 0; i < d; ++i) {
      const double pivot = lmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      if (!(pivot > 0.0)) throw DomainError("matrix is not positive definite");
      logdet += 2.0 * std::log(pivot);
    }
    logdet_ = logdet;

    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    inverse_ = Mat(d, d, Vec(inv.data(), inv.data() + d * d));
    symmetrize_in_place(inverse_);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(em);
    const Eigen::MatrixXd root = eig.eigenvectors() *
                                 eig.eigenvalues().cwiseSqrt().asDiagonal() *
                                 eig.eigenvectors().transpose();
    sqrt_ = Mat(d, d, Vec(root.data(), root.data() + d * d));
    symmetrize_in_place(sqrt_);
  }

  static SpdMatrix identity(std::size_t d) { return SpdMatrix(Mat::identity(d)); }

  std::size_t dim() const { return m_.rows(); }
  const Mat& matrix() const { return m_; }
  const Mat& inverse() const { return inverse_; }
  /// Symmetric square root H^{1/2}.
  const Mat& sqrt() const { return sqrt_; }
  double log_det() const { return logdet_; }
  double det() const { return std::exp(logdet_); }

 private:
  static void symmetrize_in_place(Mat& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const double v = 0.5 * (a(i, j) + a(j, i));
        a(i, j) = v;
        a(j, i) = v;
      }
  }

  Mat m_;
  Mat inverse_;
  Mat sqrt_;
  double logdet_ = 0.0;
};

namespace detail {

// r! / (j! (r-2j)! 2^j) = C(r, 2j) (2j-1)!!, exact.
inline std::uint64_t hermite_coefficient(std::size_t r, std::size_t j) {
  std::uint64_t odd = 1;
  for (std::uint64_t k = 1; k < 2 * j; k += 2) odd *= k;
  return binomial(r, 2 * j) * odd;
}

}  // namespace detail

/// H_r(x; Sigma) = r! sum_j (-1)^j / (j! (r-2j)! 2^j) S_{d,r}{x^{(x)r-2j} (x) (vec Sigma)^{(x)j}}.
inline Vec hermite_vector(std::size_t r, std::span<const double> x, const SpdMatrix& sigma) {
  const std::size_t d = sigma.dim();
  if (x.size() != d) throw ShapeError("hermite_vector: x length is not d");
  if (r > 20) throw SizeOverflow("hermite_vector supports r <= 20");
  const Vec vs = vec(sigma.matrix());
  Vec sum(checked_pow(d, r), 0.0);
  for (std::size_t j = 0; 2 * j <= r; ++j) {
    const double coef = static_cast<double>(detail::hermite_coefficient(r, j)) * (j % 2 ? -1.0 : 1.0);
    const Vec term = kron(kron_power(x, r - 2 * j), kron_power(vs, j));
    axpy(coef, term, sum);
  }
  return symmetrize(d, r, sum);
}

/// phi_Sigma(x) = (2 pi)^{-d/2} |Sigma|^{-1/2} exp(-x^T Sigma^-1 x / 2).
inline double gaussian_density(std::span<const double> x, const SpdMatrix& sigma) {
  const std::size_t d = sigma.dim();
  if (x.size() != d) throw ShapeError("gaussian_density: x length is not d");
  const double quad = dot(x, sigma.inverse() * x);
  return std::exp(-0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                          sigma.log_det() + quad));
}

inline DerivVec gaussian_deriv_hermite(std::size_t r, std::span<const double> x,
                                       const SpdMatrix& sigma) {
  const Vec h = hermite_vector(r, x, sigma);
  const double scale = (r % 2 ? -1.0 : 1.0) * gaussian_density(x, sigma);
  return DerivVec(sigma.dim(), 1, r, Vec(x.begin(), x.end()),
                  scaled(scale, kron_power_apply(sigma.inverse(), r, h)));
}

/// Jet of -x^T Sigma^-1 x / 2: derivatives -Sigma^-1 x, -vec Sigma^-1, then 0.
inline Jet gaussian_exponent_jet(const SpdMatrix& sigma) {
  const Mat inv = sigma.inverse();
  const std::size_t d = sigma.dim();
  auto value = [inv](std::span<const double> x) { return Vec{-0.5 * dot(x, inv * x)}; };
  auto deriv = [inv, d](std::size_t order, std::span<const double> x) {
    if (order == 1) return scaled(-1.0, inv * x);
    if (order == 2) return scaled(-1.0, vec(inv));
    return Vec(checked_pow(d, order), 0.0);
  };
  return Jet(d, 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

/// Jet of y -> scale * exp(y) on R.
inline Jet scaled_exp_jet(double scale) {
  auto value = [scale](std::span<const double> y) { return Vec{scale * std::exp(y[0])}; };
  auto deriv = [scale](std::size_t, std::span<const double> y) { return Vec{scale * std::exp(y[0])}; };
  return Jet(1, 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

inline DerivVec gaussian_deriv_fdb(std::size_t r, std::span<const double> x, const SpdMatrix& sigma) {
  if (x.size() != sigma.dim()) throw ShapeError("gaussian_deriv_fdb: x length is not d");
  const double norm = std::exp(-0.5 * (static_cast<double>(sigma.dim()) *
                                           std::log(2.0 * std::numbers::pi) +
                                       sigma.log_det()));
  return faa_di_bruno(gaussian_exponent_jet(sigma), scaled_exp_jet(norm), r, x);
}

/// Closed forms for r in {0, 1, 2, 3}; higher orders throw UnsupportedOrder.
inline DerivVec gaussian_deriv_iterative(std::size_t r, std::span<const double> x,
                                         const SpdMatrix& sigma) {
  const std::size_t d = sigma.dim();
  if (x.size() != d) throw ShapeError("gaussian_deriv_iterative: x length is not d");
  if (r > 3) throw UnsupportedOrder("iterative Gaussian path covers r <= 3");
  const double phi = gaussian_density(x, sigma);
  const Vec pt(x.begin(), x.end());
  if (r == 0) return DerivVec(d, 1, 0, pt, Vec{phi});
  const Mat& inv = sigma.inverse();
  const Vec z = inv * x;
  if (r == 1) return DerivVec(d, 1, 1, pt, scaled(-phi, z));

  Vec second = kron(z, z);
  axpy(-1.0, vec(inv), second);
  const DerivVec d2(d, 1, 2, pt, scaled(phi, second));
  if (r == 2) return d2;

  // d{D^2 phi}(x; u) = -phi {(z (x) z - vec Sigma^-1) z^T - Sigma^-1 (x) z - z (x) Sigma^-1} u
  const Mat zc = Mat::column(z);
  const Mat m = Mat::column(second) * zc.transpose() - kron(inv, zc) - kron(zc, inv);
  return identify_iterative((-phi) * m.transpose(), d2);
}

// ---------------------------------------------------------------------------
// Moments and cumulants
// ---------------------------------------------------------------------------

/// Orders 1..r of symmetric d^l-vectors; the tag separates moments from
/// cumulants at the type level.
template <class Tag>
class OrderedSet {
 public:
  OrderedSet(std::size_t d, std::vector<Vec> orders) : d_(d) {
    if (d == 0) throw ShapeError("dimension must be positive");
    for (std::size_t l = 1; l <= orders.size(); ++l) {
      const Vec& v = orders[l - 1];
      if (v.size() != checked_pow(d, l)) {
        throw ShapeError("order " + std::to_string(l) + " needs length d^" + std::to_string(l));
      }
      orders_.push_back(symmetrize(d, l, v));
    }
  }

  std::size_t d() const { return d_; }
  std::size_t max_order() const { return orders_.size(); }

  /// Order 0 is the scalar 1.
  const Vec& order(std::size_t l) const {
    static const Vec one{1.0};
    if (l == 0) return one;
    if (l > orders_.size()) {
      throw MissingOrder("set supplies orders up to " + std::to_string(orders_.size()) +
                         ", order " + std::to_string(l) + " requested");
    }
    return orders_[l - 1];
  }

  const std::vector<Vec>& orders() const { return orders_; }

 private:
  std::size_t d_;
  std::vector<Vec> orders_;
};

struct CumulantTag {};
struct MomentTag {};
using CumulantSet = OrderedSet<CumulantTag>;
using MomentSet = OrderedSet<MomentTag>;

namespace detail {

template <class Tag>
Vec chain_power(const OrderedSet<Tag>& set, const DiophTerm& term) {
  Vec chain{1.0};
  for (std::size_t l = 1; l <= term.order(); ++l)
    for (std::size_t c = 0; c < term.m[l - 1]; ++c) chain = kron(chain, set.order(l));
  return chain;
}

}  // namespace detail

/// mu_r = sum_{m in J_r} pi_m S_{d,r} (x)_l kappa_l^{(x)m_l}.
inline Vec moments_from_cumulants(const CumulantSet& k, std::size_t r) {
  if (r == 0) return Vec{1.0};
  k.order(r);
  Vec sum(checked_pow(k.d(), r), 0.0);
  for (const DiophTerm& term : enumerate_diophantine(r))
    axpy(static_cast<double>(term.pi), detail::chain_power(k, term), sum);
  return symmetrize(k.d(), r, sum);
}

/// kappa_r = sum_{m in J_r} pi_m (-1)^{|m|-1} (|m|-1)! S_{d,r} (x)_l mu_l^{(x)m_l}.
inline Vec cumulants_from_moments(const MomentSet& mu, std::size_t r) {
  if (r == 0) throw RangeError("cumulants start at order 1");
  mu.order(r);
  Vec sum(checked_pow(mu.d(), r), 0.0);
  for (const DiophTerm& term : enumerate_diophantine(r)) {
    const double sign = (term.modulus % 2 == 1) ? 1.0 : -1.0;
    const double coef = sign * static_cast<double>(term.pi) *
                        static_cast<double>(factorial(term.modulus - 1));
    axpy(coef, detail::chain_power(mu, term), sum);
  }
  return symmetrize(mu.d(), r, sum);
}

inline MomentSet to_moments(const CumulantSet& k) {
  std::vector<Vec> out;
  for (std::size_t l = 1; l <= k.max_order(); ++l) out.push_back(moments_from_cumulants(k, l));
  return MomentSet(k.d(), std::move(out));
}

inline CumulantSet to_cumulants(const MomentSet& mu) {
  std::vector<Vec> out;
  for (std::size_t l = 1; l <= mu.max_order(); ++l) out.push_back(cumulants_from_moments(mu, l));
  return CumulantSet(mu.d(), std::move(out));
}

/// Cumulant-generating function of N(mean, Sigma): t^T mean + t^T Sigma t / 2.
inline Jet gaussian_cgf_jet(Vec mean, const SpdMatrix& sigma) {
  const std::size_t d = sigma.dim();
  if (mean.size() != d) throw ShapeError("mean length is not d");
  const Mat s = sigma.matrix();
  auto value = [mean, s](std::span<const double> t) {
    return Vec{dot(t, mean) + 0.5 * dot(t, s * t)};
  };
  auto deriv = [mean, s, d](std::size_t order, std::span<const double> t) {
    if (order == 1) {
      Vec g = s * t;
      axpy(1.0, mean, g);
      return g;
    }
    if (order == 2) return vec(s);
    return Vec(checked_pow(d, order), 0.0);
  };
  return Jet(d, 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

/// mu_r = D^{(x)r} M_X(t) at t = 0 with M_X = exp o C_X, evaluated by Faa di
/// Bruno from a jet of the cumulant-generating function C_X.
inline Vec mgf_moment_check(const Jet& cgf, std::size_t r) {
  if (cgf.p() != 1) throw ShapeError("cumulant-generating function must be scalar");
  const Vec zero(cgf.d(), 0.0);
  return faa_di_bruno(cgf, scaled_exp_jet(1.0), r, zero).data;
}

}  // namespace vecdiff

#endif  // VECDIFF_GAUSSIAN_HPP
