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

// Ready-made jets with closed-form derivatives of every order.

#ifndef VECDIFF_JETS_HPP
#define VECDIFF_JETS_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

#include "vecdiff/calculus.hpp"
#include "vecdiff/gaussian.hpp"
#include "vecdiff/kron.hpp"
#include "vecdiff/symmetrizer.hpp"

namespace vecdiff {

/// x -> scale * exp(a^T x).  D^r = f(x) a^{(x)r}.
inline Jet exp_linear_jet(Vec a, double scale = 1.0) {
  const std::size_t d = a.size();
  auto value = [a, scale](std::span<const double> x) { return Vec{scale * std::exp(dot(a, x))}; };
  auto deriv = [a, scale](std::size_t r, std::span<const double> x) {
    return scaled(scale * std::exp(dot(a, x)), kron_power(a, r));
  };
  return Jet(d, 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

/// x -> sin(a^T x + phase).  D^r = sin(a^T x + phase + r pi/2) a^{(x)r}.
inline Jet sin_linear_jet(Vec a, double phase = 0.0) {
  const std::size_t d = a.size();
  auto value = [a, phase](std::span<const double> x) { return Vec{std::sin(dot(a, x) + phase)}; };
  auto deriv = [a, phase](std::size_t r, std::span<const double> x) {
    const double shift = static_cast<double>(r % 4) * std::numbers::pi / 2.0;
    return scaled(std::sin(dot(a, x) + phase + shift), kron_power(a, r));
  };
  return Jet(d, 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

/// Polynomial of degree <= 3:
///   c0 + b^T x + (1/2) vec(A)^T x^{(x)2} + c^T x^{(x)3}
/// with A symmetric and c replaced by S_{d,3} c.
inline Jet cubic_polynomial_jet(double c0, Vec b, const Mat& a, Vec c) {
  const std::size_t d = b.size();
  if (a.rows() != d || a.cols() != d) throw ShapeError("quadratic part must be d x d");
  if (c.size() != checked_pow(d, 3)) throw ShapeError("cubic part must have d^3 entries");
  Mat as = 0.5 * (a + a.transpose());
  Vec cs = symmetrize(d, 3, c);
  auto value = [c0, b, as, cs](std::span<const double> x) {
    return Vec{c0 + dot(b, x) + 0.5 * dot(x, as * x) + dot(cs, kron_power(x, 3))};
  };
  auto deriv = [d, b, as, cs](std::size_t r, std::span<const double> x) {
    const Mat xr = Mat::row(x);
    switch (r) {
      case 1: {
        Vec g = as * x;
        axpy(1.0, b, g);
        // 3 (I_d (x) (x (x) x)^T) c
        const Mat lhs = kron(Mat::identity(d), kron(xr, xr));
        axpy(3.0, lhs * cs, g);
        return g;
      }
      case 2: {
        Vec h = vec(as);
        const Mat lhs = kron(Mat::identity(d * d), xr);
        axpy(6.0, lhs * cs, h);
        return h;
      }
      case 3:
        return scaled(6.0, cs);
      default:
        return Vec(checked_pow(d, r), 0.0);
    }
  };
  return Jet(d, 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

/// Density of N(0, Sigma), derivatives by the Hermite closed form.
inline Jet gaussian_density_jet(const SpdMatrix& sigma) {
  auto value = [sigma](std::span<const double> x) { return Vec{gaussian_density(x, sigma)}; };
  auto deriv = [sigma](std::size_t r, std::span<const double> x) {
    return gaussian_deriv_hermite(r, x, sigma).data;
  };
  return Jet(sigma.dim(), 1, Jet::kUnbounded, std::move(value), std::move(deriv));
}

}  // namespace vecdiff

#endif  // VECDIFF_JETS_HPP
