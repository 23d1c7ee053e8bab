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

#ifndef VECDIFF_TAYLOR_HPP
#define VECDIFF_TAYLOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vecdiff/calculus.hpp"
#include "vecdiff/gaussian.hpp"
#include "vecdiff/kron.hpp"

namespace vecdiff {

struct TaylorResult {
  Vec approx;                    ///< sum of per_order_terms
  std::vector<Vec> per_order_terms;  ///< (1/j!) {I_p (x) (u^T)^{(x)j}} D^j f(x), j = 0..r
};

/// r-th order Taylor polynomial of f about x, evaluated at increment u.
inline TaylorResult taylor_eval(const Jet& f, std::span<const double> x, std::span<const double> u,
                                std::size_t r) {
  if (u.size() != f.d()) throw ShapeError("taylor_eval: increment length is not d");
  TaylorResult out{Vec(f.p(), 0.0), {}};
  double inv_fact = 1.0;
  for (std::size_t j = 0; j <= r; ++j) {
    if (j > 0) inv_fact /= static_cast<double>(j);
    Vec term = j == 0 ? f.value(x) : scaled(inv_fact, differential_eval(f.derivative(j, x), u));
    axpy(1.0, term, out.approx);
    out.per_order_terms.push_back(std::move(term));
  }
  return out;
}

struct RemainderReport {
  std::vector<double> scales;      ///< t_k = 2^-k, strictly decreasing
  std::vector<double> remainders;  ///< ||R(t_k u)||
  std::vector<double> ratios;      ///< ||R(t_k u)|| / ||t_k u||^r
  double slope = 0.0;              ///< least-squares exponent of ||R(t u)|| against t, or NaN
  std::size_t fit_begin = 0;       ///< first scale used in the fit
  std::size_t fitted = 0;          ///< number of consecutive scales used in the fit
};

/// Shrink u by t = 2^-1 .. 2^-n_scales and fit the decay of the remainder.
/// For a C^{r+1} function the slope approaches r + 1. The slope is an
/// asymptotic quantity, so the fit uses the finer half of the scales whose
/// remainder lies above the rounding floor of the evaluation; coarse scales can
/// be pre-asymptotic and floor-level ones carry no decay information. All
/// The slope is NaN when fewer than two scales lie above the floor.
inline RemainderReport remainder_rate(const Jet& f, std::span<const double> x,
                                      std::span<const double> u, std::size_t r,
                                      std::size_t n_scales = 8) {
  if (n_scales < 2) throw RangeError("remainder_rate needs at least two scales");
  RemainderReport rep;
  const double unorm = norm2(u);
  std::vector<double> floors;
  Vec shifted(x.size());
  Vec tu(u.size());
  for (std::size_t k = 1; k <= n_scales; ++k) {
    const double t = std::ldexp(1.0, -static_cast<int>(k));
    for (std::size_t i = 0; i < u.size(); ++i) {
      tu[i] = t * u[i];
      shifted[i] = x[i] + tu[i];
    }
    const TaylorResult tr = taylor_eval(f, x, tu, r);
    Vec rem = f.value(shifted);
    axpy(-1.0, tr.approx, rem);
    const double rn = norm2(rem);
    double magnitude = norm2(f.value(shifted));
    for (const Vec& term : tr.per_order_terms) magnitude += norm2(term);
    floors.push_back(1e3 * std::numeric_limits<double>::epsilon() * magnitude);
    rep.scales.push_back(t);
    rep.remainders.push_back(rn);
    rep.ratios.push_back(rn / std::pow(t * unorm, static_cast<double>(r)));
  }
  std::size_t end = 0;
  while (end < n_scales && rep.remainders[end] > floors[end]) ++end;
  if (end < 2) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const std::size_t begin = end - std::max<std::size_t>(std::min<std::size_t>(end, 3), (end + 1) / 2);
  rep.fit_begin = begin;
  rep.fitted = end - begin;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(end - begin);
  for (std::size_t k = begin; k < end; ++k) {
    const double lx = std::log(rep.scales[k]);
    const double ly = std::log(std::max(rep.remainders[k], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

/// ||D^k f(x)[u^k]|| / k!, the size of the k-th Taylor term at increment u.
inline double taylor_term_norm(const Jet& f, std::span<const double> x, std::span<const double> u,
                               std::size_t k) {
  double fact = 1.0;
  for (std::size_t j = 2; j <= k; ++j) fact *= static_cast<double>(j);
  const Vec term = k == 0 ? f.value(x) : differential_eval(f.derivative(k, x), u);
  return norm2(term) / fact;
}

/// True when the order r+1 term dominates the remainder over the scales
/// remainder_rate fits, so its slope is expected to be r + 1. Needs orders up
/// to r + 3 from the jet.
inline bool remainder_is_generic(const Jet& f, std::span<const double> x, std::span<const double> u,
                                 std::size_t r) {
  const double c1 = taylor_term_norm(f, x, u, r + 1);
  const double c2 = taylor_term_norm(f, x, u, r + 2);
  const double c3 = taylor_term_norm(f, x, u, r + 3);
  const double floor = 1e4 * std::numeric_limits<double>::epsilon() * std::max(1.0, norm2(f.value(x)));
  return c1 * std::pow(2.0, -5.0 * static_cast<double>(r + 1)) > floor && c2 <= 2.0 * c1 && c3 <= 32.0 * c1;
}

/// Leading bias of a 2k-th order mollifier K_H:
///   K_H * f(x) - f(x) ~ (1/(2k)!) D^{2k} f(x)^T (H^{1/2})^{(x)2k} mu_{2k}(K).
inline double mollifier_leading_term(const DerivVec& deriv2k, const SpdMatrix& h,
                                     std::span<const double> kernel_moment) {
  if (deriv2k.p != 1) throw ShapeError("mollifier term needs a scalar function");
  if (deriv2k.r == 0 || deriv2k.r % 2 != 0) throw ShapeError("mollifier term needs an even order");
  if (h.dim() != deriv2k.d) throw ShapeError("bandwidth dimension is not d");
  if (kernel_moment.size() != deriv2k.data.size()) throw ShapeError("kernel moment length is not d^{2k}");
  const Vec scaled_moment = kron_power_apply(h.sqrt(), deriv2k.r, kernel_moment);
  return dot(deriv2k.data, scaled_moment) / static_cast<double>(factorial(deriv2k.r));
}

/// mu_{2k}(K) of the standard Gaussian kernel on R^d.
inline Vec gaussian_kernel_moment(std::size_t d, std::size_t order) {
  std::vector<Vec> kappas{Vec(d, 0.0), vec(Mat::identity(d))};
  for (std::size_t l = 3; l <= order; ++l) kappas.emplace_back(checked_pow(d, l), 0.0);
  return moments_from_cumulants(CumulantSet(d, std::move(kappas)), order);
}

}  // namespace vecdiff

#endif  // VECDIFF_TAYLOR_HPP
