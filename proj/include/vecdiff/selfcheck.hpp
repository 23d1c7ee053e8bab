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

// Runtime invariant suites behind `vecdiff selfcheck`.

#ifndef VECDIFF_SELFCHECK_HPP
#define VECDIFF_SELFCHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "vecdiff/calculus.hpp"
#include "vecdiff/finite_difference.hpp"
#include "vecdiff/gaussian.hpp"
#include "vecdiff/jets.hpp"
#include "vecdiff/kron.hpp"
#include "vecdiff/symmetrizer.hpp"
#include "vecdiff/taylor.hpp"

namespace vecdiff {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      ///< worst observed deviation (or statistic)
  double tolerance = 0.0;
};

struct SelfCheckReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.passed) out.push_back(c.name);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                             {"tolerance", c.tolerance}});
    j["failures"] = failures();
    return j;
  }
};

inline constexpr std::array<std::string_view, 5> kSuiteNames{"all", "symmetrizer", "gaussian",
                                                            "fdb", "taylor"};

namespace detail {

class CheckLog {
 public:
  explicit CheckLog(SelfCheckReport& r) : report_(r) {}

  /// Records value <= tol (NaN fails).
  void le(std::string name, double value, double tol) {
    report_.checks.push_back({std::move(name), value <= tol, value, tol});
  }
  /// Records |value - target| <= tol.
  void near(std::string name, double value, double target, double tol) {
    report_.checks.push_back({std::move(name), std::abs(value - target) <= tol, value, tol});
  }

 private:
  SelfCheckReport& report_;
};

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline Mat random_mat(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  Mat a(m, n);
  const Vec v = random_vec(rng, m * n);
  std::copy(v.begin(), v.end(), a.data().begin());
  return a;
}

/// A A^T / d + (1/2) I: well conditioned and SPD.
inline SpdMatrix random_spd(std::mt19937_64& rng, std::size_t d) {
  const Mat a = random_mat(rng, d, d);
  Mat s = (1.0 / static_cast<double>(d)) * (a * a.transpose()) + 0.5 * Mat::identity(d);
  return SpdMatrix(0.5 * (s + s.transpose()));
}

inline double rel_dev(std::span<const double> a, std::span<const double> b) {
  const double scale = std::max({max_abs(a), max_abs(b), 1e-300});
  return max_abs_diff(a, b) / scale;
}

inline void symmetrizer_suite(CheckLog& log, std::mt19937_64& rng) {
  double idem = 0, transpose = 0, power = 0, forms = 0, perms = 0, sym2 = 0;
  for (std::size_t d = 1; d <= 3; ++d) {
    for (std::size_t r = 1; r <= 4; ++r) {
      const Symmetrizer free(d, r);
      const Symmetrizer mat(d, r, SymmetrizerForm::Materialized);
      const Vec v = random_vec(rng, free.size());
      const Vec sv = free.apply(v);
      idem = std::max(idem, max_abs_diff(free.apply(sv), sv));
      const Mat dense = mat.matrix().to_dense();
      transpose = std::max(transpose, max_abs_diff(dense, dense.transpose()));
      const Vec x = random_vec(rng, d);
      const Vec xr = kron_power(x, r);
      power = std::max(power, max_abs_diff(free.apply(xr), xr));
      forms = std::max(forms, max_abs_diff(mat.apply(v), sv));
      if (r <= 3) perms = std::max(perms, max_abs_diff(free.apply_by_permutations(v), sv));
    }
    const Mat a = random_mat(rng, d, d);
    sym2 = std::max(sym2, max_abs_diff(Symmetrizer(d, 2).apply(vec(a)), vec(0.5 * (a + a.transpose()))));
  }
  log.le("symmetrizer.idempotent", idem, 1e-13);
  log.le("symmetrizer.transpose_symmetric", transpose, 1e-13);
  log.le("symmetrizer.fixes_kron_powers", power, 1e-13);
  log.le("symmetrizer.matrix_free_equals_materialized", forms, 1e-13);
  log.le("symmetrizer.orbit_average_equals_permutations", perms, 1e-13);
  log.le("symmetrizer.order2_is_matrix_symmetrization", sym2, 1e-13);

  double comm = 0;
  for (std::size_t d = 2; d <= 3; ++d) {
    const Mat s = Symmetrizer(d, 3, SymmetrizerForm::Materialized).matrix().to_dense();
    const Mat k = commutation_matrix(d * d, d);
    const Mat sum = k + kron(Mat::identity(d), commutation_matrix(d, d)) * k + Mat::identity(d * d * d);
    comm = std::max(comm, max_abs_diff(s * sum, 3.0 * s));
  }
  log.le("symmetrizer.commutation_identity", comm, 1e-13);

  std::size_t bad_index = 0;
  for (std::size_t d = 1; d <= 4; ++d)
    for (std::size_t r = 1; r <= 5; ++r)
      for (std::size_t pos = 1; pos <= checked_pow(d, r); ++pos)
        if (position_of(indices_of(pos, d, r)) != pos) ++bad_index;
  log.le("index.bijection", static_cast<double>(bad_index), 0.0);

  std::size_t bad_count = 0;
  double roundtrip = 0;
  for (std::size_t d = 1; d <= 6; ++d)
    for (std::size_t r = 1; r <= 6; ++r) {
      const UniqueLayout layout(d, r);
      if (layout.count() != binomial(d + r - 1, r)) ++bad_count;
      if (checked_pow(d, r) <= 4096) {
        const Vec u = random_vec(rng, layout.count());
        const Vec full = expand_unique(u, layout);
        roundtrip = std::max(roundtrip, max_abs_diff(compress_unique(full, layout), u));
      }
    }
  log.le("index.unique_count", static_cast<double>(bad_count), 0.0);
  log.le("index.compress_expand_roundtrip", roundtrip, 0.0);
}

inline void gaussian_suite(CheckLog& log, std::mt19937_64& rng) {
  double three = 0, high = 0;
  for (std::size_t d = 1; d <= 3; ++d)
    for (int trial = 0; trial < 5; ++trial) {
      const SpdMatrix sigma = random_spd(rng, d);
      const Vec x = random_vec(rng, d);
      for (std::size_t r = 0; r <= 3; ++r) {
        const Vec h = gaussian_deriv_hermite(r, x, sigma).data;
        three = std::max(three, rel_dev(h, gaussian_deriv_fdb(r, x, sigma).data));
        three = std::max(three, rel_dev(h, gaussian_deriv_iterative(r, x, sigma).data));
      }
      if (d <= 2)
        for (std::size_t r = 4; r <= 6; ++r)
          high = std::max(high, rel_dev(gaussian_deriv_hermite(r, x, sigma).data,
                                        gaussian_deriv_fdb(r, x, sigma).data));
    }
  log.le("gaussian.three_paths_agree", three, 1e-11);
  log.le("gaussian.hermite_equals_fdb_high_order", high, 1e-11);

  double fd = 0;
  for (std::size_t d = 1; d <= 3; ++d) {
    const SpdMatrix sigma = random_spd(rng, d);
    const Vec x = random_vec(rng, d, -0.5, 0.5);
    const Jet phi = gaussian_density_jet(sigma);
    for (std::size_t r = 1; r <= 3; ++r)
      fd = std::max(fd, rel_dev(fd_derivative_vector([&](auto y) { return phi.value(y); }, x, r).data,
                                gaussian_deriv_hermite(r, x, sigma).data));
  }
  log.le("gaussian.hermite_matches_finite_differences", fd, 1e-3);

  double trip = 0;
  for (std::size_t d = 1; d <= 2; ++d) {
    std::vector<Vec> k;
    for (std::size_t l = 1; l <= 5; ++l) k.push_back(random_vec(rng, checked_pow(d, l)));
    const CumulantSet kappa(d, k);
    const CumulantSet back = to_cumulants(to_moments(kappa));
    for (std::size_t l = 1; l <= 5; ++l)
      trip = std::max(trip, max_abs_diff(back.order(l), kappa.order(l)));
  }
  log.le("moments.roundtrip_order5", trip, 1e-10);

  const CumulantSet unit(1, {Vec{0.0}, Vec{1.0}, Vec{0.0}, Vec{0.0}});
  log.near("moments.gaussian_mu4", moments_from_cumulants(unit, 4)[0], 3.0, 1e-12);
  log.le("moments.gaussian_mu3", std::abs(moments_from_cumulants(unit, 3)[0]), 1e-12);

  double mgf = 0;
  for (std::size_t d = 1; d <= 2; ++d) {
    const SpdMatrix sigma = random_spd(rng, d);
    const Vec mean = random_vec(rng, d);
    std::vector<Vec> k{mean, vec(sigma.matrix())};
    for (std::size_t l = 3; l <= 6; ++l) k.emplace_back(checked_pow(d, l), 0.0);
    const CumulantSet kappa(d, k);
    const Jet cgf = gaussian_cgf_jet(mean, sigma);
    for (std::size_t r = 1; r <= 6; ++r)
      mgf = std::max(mgf, rel_dev(mgf_moment_check(cgf, r), moments_from_cumulants(kappa, r)));
  }
  log.le("moments.mgf_path_matches_conversion", mgf, 1e-10);
}

// Complete Bell polynomial route to (g o f)^{(r)} on R: sum_k g^{(k)} B_{r,k}(f', f'', ...).
inline double bell_chain(const std::vector<double>& fd, const std::vector<double>& gd, std::size_t r) {
  // b[n][k] = B_{n,k}, recurrence B_{n,k} = sum_{i=1}^{n-k+1} C(n-1,i-1) f^{(i)} B_{n-i,k-1}
  std::vector<std::vector<double>> b(r + 1, std::vector<double>(r + 1, 0.0));
  b[0][0] = 1.0;
  for (std::size_t n = 1; n <= r; ++n)
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 1; i + k <= n + 1; ++i)
        b[n][k] += static_cast<double>(binomial(n - 1, i - 1)) * fd[i] * b[n - i][k - 1];
  double s = 0;
  for (std::size_t k = 1; k <= r; ++k) s += gd[k] * b[r][k];
  return s;
}

inline void fdb_suite(CheckLog& log, std::mt19937_64& rng) {
  double bell = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const Vec a = random_vec(rng, 1);
    const Vec c = random_vec(rng, 1);
    const Jet f = sin_linear_jet(a);
    const Jet g = exp_linear_jet({1.0});
    for (std::size_t r = 1; r <= 5; ++r) {
      std::vector<double> fd(r + 1), gd(r + 1);
      const double y = f.value(c)[0];
      for (std::size_t l = 0; l <= r; ++l) {
        fd[l] = f.derivative(l, c).data[0];
        gd[l] = g.derivative(l, Vec{y}).data[0];
      }
      const double want = bell_chain(fd, gd, r);
      const double got = faa_di_bruno(f, g, r, c).data[0];
      // relative to the summed term magnitudes; the sum itself may cancel
      for (double& v : fd) v = std::abs(v);
      for (double& v : gd) v = std::abs(v);
      bell = std::max(bell, std::abs(got - want) / std::max(bell_chain(fd, gd, r), 1e-300));
    }
  }
  log.le("fdb.univariate_bell_reduction", bell, 1e-12);

  // vector-valued composition R^2 -> R^2 -> R^2 against finite differences
  const Vec x = random_vec(rng, 2, -0.5, 0.5);
  const Jet f = Jet::stack({exp_linear_jet(random_vec(rng, 2, -0.6, 0.6)),
                            sin_linear_jet(random_vec(rng, 2), 0.3)});
  const Jet g = Jet::stack({sin_linear_jet(random_vec(rng, 2)),
                            exp_linear_jet(random_vec(rng, 2, -0.6, 0.6), 0.5)});
  const auto composed = [&](std::span<const double> y) { return g.value(f.value(y)); };
  const auto product = [&](std::span<const double> y) { return kron(f.value(y), g.value(y)); };
  double fdb_lo = 0, fdb_hi = 0, lz_lo = 0, lz_hi = 0, routes = 0;
  for (std::size_t r = 1; r <= 3; ++r) {
    const double e1 = rel_dev(faa_di_bruno(f, g, r, x).data, fd_derivative_vector(composed, x, r).data);
    const DerivVec lz = leibniz(f, g, r, x);
    const double e2 = rel_dev(lz.data, fd_derivative_vector(product, x, r).data);
    routes = std::max(routes, max_abs_diff(lz.data, leibniz(f, g, r, x, LeibnizRoute::Commutation).data));
    (r <= 2 ? fdb_lo : fdb_hi) = std::max(r <= 2 ? fdb_lo : fdb_hi, e1);
    (r <= 2 ? lz_lo : lz_hi) = std::max(r <= 2 ? lz_lo : lz_hi, e2);
  }
  log.le("fdb.composition_matches_fd_order_le2", fdb_lo, 1e-4);
  log.le("fdb.composition_matches_fd_order3", fdb_hi, 1e-3);
  log.le("leibniz.product_matches_fd_order_le2", lz_lo, 1e-4);
  log.le("leibniz.product_matches_fd_order3", lz_hi, 1e-3);
  log.le("leibniz.routes_agree", routes, 1e-13);
}

inline void taylor_suite(CheckLog& log, std::mt19937_64& rng) {
  // Draws (x, u) and function parameters until the leading remainder term is
  // generic; a vanishing order r+1 coefficient would shift the rate to r + 2.
  const auto draw = [&](std::size_t r, int family) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec x = random_vec(rng, 2, -0.5, 0.5);
      const Vec u = random_vec(rng, 2);
      Jet f = family == 0   ? exp_linear_jet(random_vec(rng, 2))
              : family == 1 ? sin_linear_jet(random_vec(rng, 2), 0.4)
                            : gaussian_density_jet(random_spd(rng, 2));
      if (remainder_is_generic(f, x, u, r)) return std::optional(std::tuple(std::move(f), x, u));
    }
    return std::optional<std::tuple<Jet, Vec, Vec>>();
  };
  double worst_slope = 0;
  for (std::size_t r = 1; r <= 3; ++r)
    for (int family = 0; family < 3; ++family) {
      const auto data = draw(r, family);
      if (!data) {
        worst_slope = std::numeric_limits<double>::infinity();
        continue;
      }
      const auto& [f, x, u] = *data;
      const double slope = remainder_rate(f, x, u, r, 8).slope;
      worst_slope = std::max(worst_slope, std::isnan(slope) ? std::numeric_limits<double>::infinity()
                                                            : std::abs(slope - static_cast<double>(r + 1)));
    }
  log.le("taylor.remainder_slope", worst_slope, 0.2);

  double exact = 0;
  for (std::size_t deg = 1; deg <= 3; ++deg) {
    const std::size_t d = 2;
    const Vec b = random_vec(rng, d);
    const Mat a = deg >= 2 ? random_mat(rng, d, d) : Mat(d, d);
    const Vec c = deg >= 3 ? random_vec(rng, 8) : Vec(8, 0.0);
    const Jet poly = cubic_polynomial_jet(0.7, b, a, c);
    const Vec x = random_vec(rng, d);
    const Vec u = random_vec(rng, d);
    Vec xu = x;
    axpy(1.0, u, xu);
    exact = std::max(exact, std::abs(taylor_eval(poly, x, u, deg).approx[0] - poly.value(xu)[0]));
  }
  log.le("taylor.polynomial_exactness", exact, 1e-12);

  // Gaussian kernel smoothing of exp(a^T x) is exact: K_H * f = f exp(a^T H a / 2).
  const Vec a = random_vec(rng, 2);
  const Vec x = random_vec(rng, 2);
  const SpdMatrix base = random_spd(rng, 2);
  double ratio_dev = 0;
  for (double t : {1e-2, 1e-3}) {
    const SpdMatrix h(t * base.matrix());
    const Jet f = exp_linear_jet(a);
    const double bias = f.value(x)[0] * std::expm1(0.5 * dot(a, h.matrix() * a));
    const double lead = mollifier_leading_term(f.derivative(2, x), h, gaussian_kernel_moment(2, 2));
    ratio_dev = std::max(ratio_dev, std::abs(bias / lead - 1.0) / t);
  }
  log.le("taylor.mollifier_leading_term", ratio_dev, 10.0);
}

}  // namespace detail

/// Runs one named suite (or "all"). Throws UnknownKind for other names.
inline SelfCheckReport run_selfcheck(std::string_view suite, std::uint64_t seed) {
  if (std::find(kSuiteNames.begin(), kSuiteNames.end(), suite) == kSuiteNames.end())
    throw UnknownKind("unknown suite '" + std::string(suite) + "'");
  SelfCheckReport report{std::string(suite), seed, {}};
  detail::CheckLog log(report);
  std::mt19937_64 rng(seed);
  const bool all = suite == "all";
  if (all || suite == "symmetrizer") detail::symmetrizer_suite(log, rng);
  if (all || suite == "gaussian") detail::gaussian_suite(log, rng);
  if (all || suite == "fdb") detail::fdb_suite(log, rng);
  if (all || suite == "taylor") detail::taylor_suite(log, rng);
  return report;
}

}  // namespace vecdiff

#endif  // VECDIFF_SELFCHECK_HPP
