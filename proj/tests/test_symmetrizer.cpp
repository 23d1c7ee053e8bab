#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vecdiff/symmetrizer.hpp"

using namespace vecdiff;

TEST(Position, SmallCases) {
  EXPECT_EQ(position_of({2, {1, 1}}), 1u);
  EXPECT_EQ(position_of({2, {2, 2}}), 4u);
  EXPECT_EQ(position_of({2, {1, 2}}), 2u);
  EXPECT_EQ(position_of({3, {}}), 1u);
}

TEST(Position, MatchesKroneckerExpansion) {
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t r = 1; r <= 3; ++r)
      for (std::size_t pos = 1; pos <= oracle::ipow(d, r); ++pos) {
        const MultiIndex mi = indices_of(pos, d, r);
        EXPECT_EQ(position_of(mi) - 1, oracle::brute_position(mi.indices, d));
      }
}

TEST(Position, RejectsOutOfRangeIndex) { EXPECT_THROW(position_of({2, {1, 3}}), RangeError); }

TEST(Indices, Literal) {
  EXPECT_EQ(indices_of(6, 3, 2).indices, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(indices_of(8, 2, 3).indices, (std::vector<std::size_t>{2, 2, 2}));
}

TEST(Indices, ExhaustiveRoundTrip) {
  for (std::size_t d = 1; d <= 4; ++d)
    for (std::size_t r = 1; r <= 5; ++r)
      for (std::size_t pos = 1; pos <= oracle::ipow(d, r); ++pos)
        ASSERT_EQ(position_of(indices_of(pos, d, r)), pos) << d << " " << r;
}

TEST(Indices, OutOfRange) {
  EXPECT_THROW(indices_of(0, 2, 2), RangeError);
  EXPECT_THROW(indices_of(5, 2, 2), RangeError);
}

TEST(Symmetrizer, OrderOneIsIdentity) {
  const Vec v{1, -2, 3};
  EXPECT_EQ(Symmetrizer(3, 1).apply(v), v);
}

TEST(Symmetrizer, OrderTwoSymmetrizesMatrix) {
  std::mt19937_64 rng(11);
  const Mat a = oracle::uniform_mat(rng, 3, 3);
  const Vec want = vec(0.5 * (a + a.transpose()));
  EXPECT_LT(max_abs_diff(Symmetrizer(3, 2).apply(vec(a)), want), 1e-15);
}

TEST(Symmetrizer, FixesPurePowers) {
  std::mt19937_64 rng(12);
  const Vec x = oracle::uniform(rng, 3);
  const Vec x4 = oracle::kron_power_naive(x, 4);
  EXPECT_LT(max_abs_diff(Symmetrizer(3, 4).apply(x4), x4), 1e-15);
}

TEST(Symmetrizer, MatchesPermutationOracle) {
  std::mt19937_64 rng(13);
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t r = 1; r <= 4; ++r) {
      const Vec v = oracle::uniform(rng, oracle::ipow(d, r));
      const Vec want = oracle::symmetrize_by_permutations(v, d, r);
      const Symmetrizer s(d, r);
      EXPECT_LT(max_abs_diff(s.apply(v), want), 1e-15) << d << "," << r;
      EXPECT_LT(max_abs_diff(s.apply_by_permutations(v), want), 1e-15);
      EXPECT_LT(max_abs_diff(Symmetrizer(d, r, SymmetrizerForm::Materialized).apply(v), want), 1e-15);
    }
}

TEST(Symmetrizer, LengthMismatch) { EXPECT_THROW(Symmetrizer(2, 2).apply(Vec{1, 2, 3}), ShapeError); }

TEST(Symmetrizer, MaterializedOneDimensional) {
  for (std::size_t r = 0; r <= 5; ++r) EXPECT_EQ(materialize_symmetrizer(1, r).to_dense(), Mat::identity(1));
}

TEST(Symmetrizer, MaterializedOrderTwoRows) {
  const Mat s = materialize_symmetrizer(2, 2).to_dense();
  EXPECT_EQ(s, Mat::from_rows({{1, 0, 0, 0}, {0, 0.5, 0.5, 0}, {0, 0.5, 0.5, 0}, {0, 0, 0, 1}}));
}

TEST(Symmetrizer, MaterializedIdempotentAndSymmetric) {
  const Mat s = materialize_symmetrizer(2, 3).to_dense();
  EXPECT_LT(max_abs_diff(s * s, s), 1e-15);
  EXPECT_EQ(s, s.transpose());
}

TEST(Symmetrizer, RowSumsAreOne) {
  const Mat s = materialize_symmetrizer(2, 3).to_dense();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < s.cols(); ++j) sum += s(i, j);
    EXPECT_NEAR(sum, 1.0, 1e-15);
  }
}

TEST(Symmetrizer, MaterializeOverflow) { EXPECT_THROW(materialize_symmetrizer(2, 30), SizeOverflow); }

TEST(Symmetrizer, CommutationIdentity) {
  for (std::size_t d = 2; d <= 3; ++d) {
    const Mat s = materialize_symmetrizer(d, 3).to_dense();
    const Mat k = commutation_matrix(d * d, d);
    const Mat sum = k + oracle::kron_naive(oracle::eye(d), commutation_matrix(d, d)) * k + oracle::eye(d * d * d);
    EXPECT_LT(max_abs_diff(s * sum, 3.0 * s), 1e-13);
  }
}

TEST(Symmetrizer, OrbitSizes) {
  const Symmetrizer s(3, 3);
  EXPECT_EQ(s.orbit_size(0), 1u);                                 // (1,1,1)
  EXPECT_EQ(s.orbit_size(position_of({3, {1, 2, 3}}) - 1), 6u);  // all distinct
  EXPECT_EQ(s.orbit_size(position_of({3, {2, 1, 1}}) - 1), 3u);
}

TEST(Unique, Counts) {
  EXPECT_EQ(UniqueLayout(3, 4).count(), 15u);
  for (std::size_t d = 1; d <= 6; ++d)
    for (std::size_t r = 1; r <= 6; ++r) EXPECT_EQ(UniqueLayout(d, r).count(), binomial(d + r - 1, r));
}

TEST(Unique, MultiplicitiesSumToFull) {
  const UniqueLayout layout(3, 3);
  std::size_t sum = 0;
  for (std::size_t m : layout.multiplicities()) sum += m;
  EXPECT_EQ(sum, 27u);
}

TEST(Unique, CompressSymmetricMatrix) {
  const Mat a = Mat::from_rows({{1, 2}, {2, 3}});
  EXPECT_EQ(compress_unique(vec(a), UniqueLayout(2, 2)), (Vec{1, 2, 3}));
}

TEST(Unique, Expand) {
  const UniqueLayout layout(2, 2);
  EXPECT_EQ(expand_unique(Vec{1, 2, 3}, layout), (Vec{1, 2, 2, 3}));
  const UniqueLayout l3(3, 3);
  EXPECT_EQ(expand_unique(Vec(l3.count(), 1.0), l3), Vec(27, 1.0));
}

TEST(Unique, RoundTrip) {
  std::mt19937_64 rng(14);
  for (std::size_t d = 1; d <= 4; ++d)
    for (std::size_t r = 1; r <= 4; ++r) {
      const UniqueLayout layout(d, r);
      const Vec v = Symmetrizer(d, r).apply(oracle::uniform(rng, oracle::ipow(d, r)));
      const Vec u = compress_unique(v, layout);
      EXPECT_EQ(expand_unique(u, layout), v);
      EXPECT_EQ(compress_unique(expand_unique(u, layout), layout), u);
    }
}

TEST(Unique, RejectsAsymmetric) {
  EXPECT_THROW(compress_unique(Vec{1, 2, 0, 3}, UniqueLayout(2, 2)), NonSymmetricInput);
}

TEST(Unique, ShapeErrors) {
  EXPECT_THROW(compress_unique(Vec{1, 2, 3}, UniqueLayout(2, 2)), ShapeError);
  EXPECT_THROW(expand_unique(Vec{1, 2}, UniqueLayout(2, 2)), ShapeError);
}

TEST(Combinatorics, BinomialAndFactorial) {
  EXPECT_EQ(binomial(6, 4), 15u);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(binomial(62, 31), 465428353255261088ull);
  EXPECT_THROW(binomial(100, 50), SizeOverflow);
  EXPECT_EQ(factorial(20), 2432902008176640000ull);
  EXPECT_THROW(factorial(21), SizeOverflow);
}
