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

// Central finite differences of every mixed partial up to order 3,
// Richardson-extrapolated and assembled in vectorized-derivative layout.
// Used as a numerical oracle for the closed-form rules.

#ifndef VECDIFF_FINITE_DIFFERENCE_HPP
#define VECDIFF_FINITE_DIFFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vecdiff/calculus.hpp"
#include "vecdiff/symmetrizer.hpp"

namespace vecdiff {

enum class FdScheme { Central };

struct FdConfig {
  /// Base step; 0 selects eps^{1/(r+2)} * max(1, max|x|).
  double step = 0.0;
  FdScheme scheme = FdScheme::Central;
  /// Number of step halvings combined by Richardson extrapolation.
  std::size_t richardson_levels = 1;
  /// Allowed relative disagreement between the two finest estimates.
  double consistency_tol = 1e-2;
};

using PointFunction = std::function<Vec(std::span<const double>)>;

namespace detail {

// Tensor-product central difference of one mixed partial:
//   sum_{s in {-1,1}^r} prod(s) f(x + h sum_t s_t e_{i_t}) / (2h)^r
inline Vec central_mixed_partial(const PointFunction& f, std::span<const double> x,
                                 const std::vector<std::size_t>& idx0, double h, std::size_t p) {
  const std::size_t r = idx0.size();
  Vec acc(p, 0.0);
  Vec shifted(x.size());
  for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
    std::copy(x.begin(), x.end(), shifted.begin());
    double sign = 1.0;
    for (std::size_t t = 0; t < r; ++t) {
      const bool plus = (mask >> t) & 1u;
      shifted[idx0[t]] += plus ? h : -h;
      if (!plus) sign = -sign;
    }
    const Vec v = f(shifted);
    if (v.size() != p) throw ShapeError("function output length changed between evaluations");
    axpy(sign, v, acc);
  }
  const double denom = std::pow(2.0 * h, static_cast<double>(r));
  for (double& a : acc) a /= denom;
  return acc;
}

// Every unique partial at step h, laid out as p blocks of the unique count.
inline Vec unique_partials(const PointFunction& f, std::span<const double> x,
                           const UniqueLayout& layout, double h, std::size_t p) {
  Vec out(p * layout.count());
  std::vector<std::size_t> idx0(layout.r());
  for (std::size_t k = 0; k < layout.count(); ++k) {
    const MultiIndex& mi = layout.canonical_list()[k];
    for (std::size_t t = 0; t < mi.order(); ++t) idx0[t] = mi.indices[t] - 1;
    const Vec v = central_mixed_partial(f, x, idx0, h, p);
    for (std::size_t c = 0; c < p; ++c) out[c * layout.count() + k] = v[c];
  }
  return out;
}

}  // namespace detail

/// Numerical D^{(x)r} f(x) for r <= 3.
///
/// Each unique mixed partial is estimated by a central difference at steps
/// h, h/2, ..., Richardson-combined (the error expands in h^2), then copied
/// to every position of its orbit. Throws StepTooSmall when the two finest
/// raw estimates disagree beyond cfg.consistency_tol.
inline DerivVec fd_derivative_vector(const PointFunction& f, std::span<const double> x,
                                     std::size_t r, const FdConfig& cfg = {}) {
  if (r == 0 || r > 3) throw UnsupportedOrder("finite differences cover orders 1..3");
  if (x.empty()) throw ShapeError("empty evaluation point");
  if (cfg.step < 0.0 || !std::isfinite(cfg.step)) throw RangeError("step must be positive");
  const std::size_t d = x.size();
  const Vec fx = f(x);
  const std::size_t p = fx.size();
  if (p == 0) throw ShapeError("function returned an empty vector");

  double h = cfg.step;
  if (h == 0.0) {
    const double eps = std::numeric_limits<double>::epsilon();
    h = std::pow(eps, 1.0 / static_cast<double>(r + 2)) * std::max(1.0, max_abs(x));
  }

  const UniqueLayout layout(d, r);
  const std::size_t levels = cfg.richardson_levels;
  // table[k] holds estimates at h / 2^k, successively extrapolated in place
  std::vector<Vec> table;
  for (std::size_t k = 0; k <= levels; ++k)
    table.push_back(detail::unique_partials(f, x, layout, std::ldexp(h, -static_cast<int>(k)), p));

  if (levels >= 1) {
    const Vec& coarse = table[levels - 1];
    const Vec& fine = table[levels];
    const double scale = std::max({max_abs(coarse), max_abs(fine), max_abs(fx)});
    const double dev = max_abs_diff(coarse, fine);
    if (scale > 0.0 && dev > cfg.consistency_tol * scale) {
      throw StepTooSmall("estimates at h=" + std::to_string(h) +
                         " are dominated by round-off (relative spread " +
                         std::to_string(dev / scale) + ")");
    }
  }

  for (std::size_t level = 1; level <= levels; ++level) {
    const double factor = std::pow(4.0, static_cast<double>(level));
    for (std::size_t k = levels; k >= level; --k) {
      for (std::size_t i = 0; i < table[k].size(); ++i)
        table[k][i] = (factor * table[k][i] - table[k - 1][i]) / (factor - 1.0);
    }
  }
  const Vec& best = table[levels];

  const Symmetrizer s(d, r);
  Vec data;
  data.reserve(p * layout.full_size());
  for (std::size_t c = 0; c < p; ++c) {
    const auto unique = std::span<const double>(best).subspan(c * layout.count(), layout.count());
    const Vec full = s.apply(expand_unique(unique, layout));
    data.insert(data.end(), full.begin(), full.end());
  }
  return DerivVec(d, p, r, Vec(x.begin(), x.end()), std::move(data));
}

}  // namespace vecdiff

#endif  // VECDIFF_FINITE_DIFFERENCE_HPP
