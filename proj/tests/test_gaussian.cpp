#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vecdiff/gaussian.hpp"

using namespace vecdiff;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

Vec inverse_times(const SpdMatrix& s, const Vec& x) { return oracle::matvec(s.inverse(), x); }

}  // namespace

TEST(Spd, AcceptsAndFactorizes) {
  const Mat m = Mat::from_rows({{2.0, 0.5}, {0.5, 1.0}});
  const SpdMatrix s(m);
  EXPECT_LT(max_abs_diff(oracle::matmul(s.inverse(), m), oracle::eye(2)), 1e-15);
  EXPECT_LT(max_abs_diff(oracle::matmul(s.sqrt(), s.sqrt()), m), 1e-15);
  EXPECT_NEAR(s.det(), 2.0 - 0.25, 1e-15);
  EXPECT_NEAR(s.log_det(), std::log(1.75), 1e-15);
}

TEST(Spd, RejectsNonSpd) {
  EXPECT_THROW(SpdMatrix(Mat::from_rows({{1, 2}, {2, 1}})), DomainError);
  EXPECT_THROW(SpdMatrix(Mat::from_rows({{1, 0.5}, {0.2, 1}})), DomainError);
  EXPECT_THROW(SpdMatrix(Mat(2, 3)), ShapeError);
}

TEST(Hermite, LowOrders) {
  std::mt19937_64 rng(41);
  const Mat sm = oracle::spd(rng, 3);
  const SpdMatrix s(sm);
  const Vec x = oracle::uniform(rng, 3);
  const Vec vs = oracle::vec_naive(sm);
  EXPECT_EQ(hermite_vector(0, x, s), Vec{1.0});
  EXPECT_LT(max_abs_diff(hermite_vector(1, x, s), x), 1e-15);

  Vec h2 = oracle::kron_naive(x, x);
  for (std::size_t i = 0; i < h2.size(); ++i) h2[i] -= vs[i];
  EXPECT_LT(max_abs_diff(hermite_vector(2, x, s), h2), 1e-15);

  Vec h3 = oracle::kron_power_naive(x, 3);
  const Vec xs = oracle::kron_naive(x, vs);
  for (std::size_t i = 0; i < h3.size(); ++i) h3[i] -= 3.0 * xs[i];
  EXPECT_LT(max_abs_diff(hermite_vector(3, x, s), oracle::symmetrize_by_permutations(h3, 3, 3)), 1e-14);
}

TEST(Hermite, ScalarCaseIsProbabilistsHermite) {
  const SpdMatrix one = SpdMatrix::identity(1);
  for (std::size_t r = 0; r <= 10; ++r)
    for (double x : {-1.7, 0.0, 0.4, 2.3})
      EXPECT_NEAR(hermite_vector(r, Vec{x}, one)[0], oracle::hermite_he(r, x), 1e-10 * (1 + std::abs(oracle::hermite_he(r, x))));
}

TEST(Density, StandardNormalAtZero) {
  EXPECT_NEAR(gaussian_density(Vec{0.0}, SpdMatrix::identity(1)), 0.3989422804, 1e-10);
}

TEST(Density, DecaysAlongRays) {
  std::mt19937_64 rng(42);
  const SpdMatrix s(oracle::spd(rng, 2));
  const Vec dir = oracle::uniform(rng, 2);
  double prev = gaussian_density(Vec{0, 0}, s);
  for (double t = 0.5; t < 20; t += 0.5) {
    const double v = gaussian_density(Vec{t * dir[0], t * dir[1]}, s);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-20);
}

TEST(Density, IntegratesToOne) {
  const SpdMatrix s(Mat::from_rows({{2.25}}));
  EXPECT_NEAR(oracle::simpson([&](double x) { return gaussian_density(Vec{x}, s); }, -15, 15, 2000), 1.0, 1e-6);
  const SpdMatrix s2(Mat::from_rows({{1.0, 0.4}, {0.4, 0.8}}));
  const double total = oracle::simpson(
      [&](double y) {
        return oracle::simpson([&](double x) { return gaussian_density(Vec{x, y}, s2); }, -9, 9, 300);
      },
      -9, 9, 300);
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(GaussianDeriv, HermitePathClosedForms) {
  std::mt19937_64 rng(43);
  const Mat sm = oracle::spd(rng, 2);
  const SpdMatrix s(sm);
  const Vec x = oracle::uniform(rng, 2);
  const double phi = gaussian_density(x, s);
  const Vec z = inverse_times(s, x);
  const Vec vinv = oracle::vec_naive(s.inverse());

  const Vec d1 = gaussian_deriv_hermite(1, x, s).data;
  EXPECT_LT(max_abs_diff(d1, scaled(-phi, z)), 1e-15);

  Vec d2 = oracle::kron_naive(z, z);
  for (std::size_t i = 0; i < d2.size(); ++i) d2[i] = phi * (d2[i] - vinv[i]);
  EXPECT_LT(max_abs_diff(gaussian_deriv_hermite(2, x, s).data, d2), 1e-15);

  Vec d3 = oracle::kron_power_naive(z, 3);
  const Vec zv = oracle::kron_naive(z, vinv);
  for (std::size_t i = 0; i < d3.size(); ++i) d3[i] -= 3.0 * zv[i];
  d3 = scaled(-phi, oracle::symmetrize_by_permutations(d3, 2, 3));
  EXPECT_LT(max_abs_diff(gaussian_deriv_hermite(3, x, s).data, d3), 1e-14);
}

TEST(GaussianDeriv, ScalarDerivativesMatchHermitePolynomials) {
  // phi_s^{(r)}(x) = (-1)^r s^{-r} He_r(x / s) phi_s(x)
  const double sd = 1.3;
  const SpdMatrix s(Mat::from_rows({{sd * sd}}));
  for (std::size_t r = 0; r <= 8; ++r)
    for (double x : {-0.9, 0.0, 1.4}) {
      const double want = (r % 2 ? -1.0 : 1.0) * std::pow(sd, -static_cast<double>(r)) *
                          oracle::hermite_he(r, x / sd) * gaussian_density(Vec{x}, s);
      EXPECT_NEAR(gaussian_deriv_hermite(r, Vec{x}, s).data[0], want, 1e-12) << r;
      EXPECT_NEAR(gaussian_deriv_fdb(r, Vec{x}, s).data[0], want, 1e-12) << r;
      if (r <= 3) {
        EXPECT_NEAR(gaussian_deriv_iterative(r, Vec{x}, s).data[0], want, 1e-12) << r;
      }
    }
}

TEST(GaussianDeriv, FdbMatchesHermite) {
  std::mt19937_64 rng(44);
  const SpdMatrix s(oracle::spd(rng, 2));
  const Vec x = oracle::uniform(rng, 2);
  for (std::size_t r = 0; r <= 6; ++r)
    EXPECT_LT(oracle::rel_diff(gaussian_deriv_fdb(r, x, s).data, gaussian_deriv_hermite(r, x, s).data), 1e-11) << r;
  EXPECT_NEAR(gaussian_deriv_fdb(4, Vec{0.0}, SpdMatrix::identity(1)).data[0], 3.0 * kInvSqrt2Pi, 1e-15);
  EXPECT_LT(max_abs_diff(gaussian_deriv_fdb(1, x, s).data, scaled(-gaussian_density(x, s), inverse_times(s, x))),
            1e-15);
}

TEST(GaussianDeriv, IterativeMatchesOtherPaths) {
  std::mt19937_64 rng(45);
  for (std::size_t d = 1; d <= 3; ++d) {
    const SpdMatrix s(oracle::spd(rng, d));
    const Vec x = oracle::uniform(rng, d);
    for (std::size_t r = 0; r <= 3; ++r) {
      const Vec it = gaussian_deriv_iterative(r, x, s).data;
      EXPECT_LT(oracle::rel_diff(it, gaussian_deriv_hermite(r, x, s).data), 1e-12);
      EXPECT_LT(oracle::rel_diff(it, gaussian_deriv_fdb(r, x, s).data), 1e-12);
    }
  }
}

TEST(GaussianDeriv, IterativeHessianAtOrigin) {
  std::mt19937_64 rng(46);
  const SpdMatrix s(oracle::spd(rng, 3));
  const Vec zero(3, 0.0);
  const Vec want = scaled(-gaussian_density(zero, s), oracle::vec_naive(s.inverse()));
  EXPECT_LT(max_abs_diff(gaussian_deriv_iterative(2, zero, s).data, want), 1e-15);
}

TEST(GaussianDeriv, IterativeRejectsHighOrder) {
  EXPECT_THROW(gaussian_deriv_iterative(4, Vec{0.0}, SpdMatrix::identity(1)), UnsupportedOrder);
}

TEST(GaussianDeriv, DensityValueAtOrderZero) {
  EXPECT_NEAR(gaussian_deriv_hermite(0, Vec{0.0}, SpdMatrix::identity(1)).data[0], kInvSqrt2Pi, 1e-16);
}

TEST(GaussianDeriv, StandardNormalSecondDerivativeAtZero) {
  EXPECT_NEAR(gaussian_deriv_hermite(2, Vec{0.0}, SpdMatrix::identity(1)).data[0], -kInvSqrt2Pi, 1e-16);
}

// ---------------------------------------------------------------------------

TEST(Moments, LowOrders) {
  std::mt19937_64 rng(47);
  const Vec k1 = oracle::uniform(rng, 2);
  const Mat k2m = oracle::spd(rng, 2);
  const CumulantSet k(2, {k1, oracle::vec_naive(k2m)});
  EXPECT_EQ(moments_from_cumulants(k, 1), k1);
  Vec want = oracle::kron_naive(k1, k1);
  for (std::size_t i = 0; i < 4; ++i) want[i] += oracle::vec_naive(k2m)[i];
  EXPECT_LT(max_abs_diff(moments_from_cumulants(k, 2), want), 1e-15);
  EXPECT_EQ(moments_from_cumulants(k, 0), Vec{1.0});
}

TEST(Moments, GaussianFourthMomentIsIsserlis) {
  std::mt19937_64 rng(48);
  const Mat sm = oracle::spd(rng, 2);
  const CumulantSet k(2, {Vec(2, 0.0), oracle::vec_naive(sm), Vec(8, 0.0), Vec(16, 0.0)});
  const Vec mu4 = moments_from_cumulants(k, 4);
  for (std::size_t pos = 0; pos < 16; ++pos) {
    const std::size_t i = pos / 8, j = (pos / 4) % 2, l = (pos / 2) % 2, m = pos % 2;
    const double want = sm(i, j) * sm(l, m) + sm(i, l) * sm(j, m) + sm(i, m) * sm(j, l);
    EXPECT_NEAR(mu4[pos], want, 1e-15);
  }
  EXPECT_LT(max_abs(moments_from_cumulants(k, 3)), 1e-15);
  const CumulantSet unit(1, {Vec{0.0}, Vec{1.0}, Vec{0.0}, Vec{0.0}});
  EXPECT_NEAR(moments_from_cumulants(unit, 4)[0], 3.0, 1e-12);
}

TEST(Moments, ScalarShiftedNormal) {
  // E X^4 for N(m, v): m^4 + 6 m^2 v + 3 v^2
  const double m = 0.7, v = 1.9;
  const CumulantSet k(1, {Vec{m}, Vec{v}, Vec{0.0}, Vec{0.0}});
  EXPECT_NEAR(moments_from_cumulants(k, 4)[0], std::pow(m, 4) + 6 * m * m * v + 3 * v * v, 1e-12);
}

TEST(Cumulants, LowOrders) {
  std::mt19937_64 rng(49);
  const Vec m1 = oracle::uniform(rng, 2);
  const Vec m2 = oracle::vec_naive(oracle::spd(rng, 2));
  const MomentSet mu(2, {m1, m2});
  EXPECT_EQ(cumulants_from_moments(mu, 1), m1);
  Vec want = m2;
  const Vec mm = oracle::kron_naive(m1, m1);
  for (std::size_t i = 0; i < 4; ++i) want[i] -= mm[i];
  EXPECT_LT(max_abs_diff(cumulants_from_moments(mu, 2), want), 1e-15);
}

TEST(Cumulants, RoundTrip) {
  std::mt19937_64 rng(50);
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<Vec> k;
    for (std::size_t l = 1; l <= 4; ++l)
      k.push_back(oracle::symmetrize_by_permutations(oracle::uniform(rng, oracle::ipow(d, l)), d, l));
    const CumulantSet kappa(d, k);
    const CumulantSet back = to_cumulants(to_moments(kappa));
    for (std::size_t l = 1; l <= 4; ++l) EXPECT_LT(max_abs_diff(back.order(l), k[l - 1]), 1e-10);
  }
}

TEST(Cumulants, MissingOrder) {
  const CumulantSet k(1, {Vec{0.0}, Vec{1.0}});
  EXPECT_THROW(moments_from_cumulants(k, 3), MissingOrder);
  const MomentSet mu(1, {Vec{0.0}});
  EXPECT_THROW(cumulants_from_moments(mu, 2), MissingOrder);
  EXPECT_THROW(CumulantSet(2, {Vec{1.0}}), ShapeError);
}

TEST(Mgf, CenteredGaussian) {
  std::mt19937_64 rng(51);
  const Mat sm = oracle::spd(rng, 2);
  const SpdMatrix s(sm);
  const Jet cgf = gaussian_cgf_jet(Vec(2, 0.0), s);
  EXPECT_LT(max_abs_diff(mgf_moment_check(cgf, 2), oracle::vec_naive(sm)), 1e-15);
  EXPECT_LT(max_abs(mgf_moment_check(cgf, 3)), 1e-15);
  EXPECT_LT(max_abs(mgf_moment_check(cgf, 5)), 1e-15);
  EXPECT_NEAR(mgf_moment_check(gaussian_cgf_jet(Vec{0.0}, SpdMatrix::identity(1)), 6)[0], 15.0, 1e-12);
}

TEST(Mgf, AgreesWithConversion) {
  std::mt19937_64 rng(52);
  const SpdMatrix s(oracle::spd(rng, 2));
  const Vec mean = oracle::uniform(rng, 2);
  std::vector<Vec> k{mean, oracle::vec_naive(s.matrix())};
  for (std::size_t l = 3; l <= 6; ++l) k.emplace_back(oracle::ipow(2, l), 0.0);
  const CumulantSet kappa(2, k);
  const Jet cgf = gaussian_cgf_jet(mean, s);
  for (std::size_t r = 1; r <= 6; ++r)
    EXPECT_LT(oracle::rel_diff(mgf_moment_check(cgf, r), moments_from_cumulants(kappa, r)), 1e-10) << r;
}
