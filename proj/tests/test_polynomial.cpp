#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracpoly/polynomial.hpp"
#include "oracles.hpp"

using namespace fracpoly;

namespace {

Polynomial example1() {
  const Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  return poly_pow(x2 - Polynomial::constant(2, 2.0), 2) + 2.0 * x1 * x1 + x1 * x2 + Polynomial::constant(2, 5.0);
}

}  // namespace

TEST(Basis, TwoVariablesDegreeTwoOrder) {
  const MonomialBasis b(2, 2);
  const std::vector<MultiIndex> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  ASSERT_EQ(b.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(b[i], want[i]) << i;
}

TEST(Basis, SizeMatchesPascalAndOrderIsStrict) {
  for (unsigned n = 1; n <= 6; ++n)
    for (unsigned v = 0; v <= 10; ++v) {
      const MonomialBasis b(n, v);
      EXPECT_EQ(b.size(), oracle::binomial(n + v, v)) << n << "," << v;
      EXPECT_EQ(basis_size(n, v), oracle::binomial(n + v, v));
      for (std::size_t i = 1; i < b.size(); ++i) ASSERT_TRUE(b[i - 1] < b[i]) << n << "," << v << " at " << i;
      for (std::size_t i = 0; i < b.size(); ++i) ASSERT_EQ(b.position(b[i]), i);
    }
}

TEST(Basis, KnownSizes) {
  EXPECT_EQ(basis_size(2, 6), 28u);
  EXPECT_EQ(basis_size(2, 4), 15u);
  EXPECT_EQ(basis_size(1, 0), 1u);
  EXPECT_EQ(MonomialBasis(3, 0).size(), 1u);
}

TEST(Basis, AbsentMonomial) {
  const MonomialBasis b(2, 1);
  EXPECT_FALSE(b.contains(MultiIndex{1, 1}));
  EXPECT_EQ(b.position(MultiIndex{1, 1}), b.size());
}

TEST(Basis, TooLargeToEnumerate) { EXPECT_THROW(MonomialBasis(30, 30), std::range_error); }

TEST(Arithmetic, AddNegationIsZero) {
  const Polynomial p = example1();
  EXPECT_TRUE(poly_add(p, poly_scale(p, -1.0)).is_zero());
}

TEST(Arithmetic, ProductOfVariables) {
  const Polynomial r = poly_mul(Polynomial::variable(2, 0), Polynomial::variable(2, 1));
  EXPECT_EQ(r.num_terms(), 1u);
  EXPECT_EQ(r.coeff(MultiIndex{1, 1}), 1.0);
}

TEST(Arithmetic, ScalarDinkelbachIterate) {
  const Polynomial x = Polynomial::variable(1, 0);
  const Polynomial f = x, g = x * x + Polynomial::constant(1, 1.0);
  const Polynomial F = f - 0.4 * g;
  EXPECT_DOUBLE_EQ(F.coeff(MultiIndex{0}), -0.4);
  EXPECT_DOUBLE_EQ(F.coeff(MultiIndex{1}), 1.0);
  EXPECT_DOUBLE_EQ(F.coeff(MultiIndex{2}), -0.4);
  EXPECT_EQ(F.num_terms(), 3u);
}

TEST(Arithmetic, DimensionMismatch) {
  EXPECT_THROW(poly_add(Polynomial::variable(1, 0), Polynomial::variable(2, 0)), DimensionError);
  EXPECT_THROW(poly_mul(Polynomial::variable(1, 0), Polynomial::variable(2, 0)), DimensionError);
  Polynomial p(2);
  EXPECT_THROW(p.add_term(MultiIndex{1}, 1.0), DimensionError);
}

TEST(Arithmetic, ExactZeroPruning) {
  Polynomial p(1);
  p.add_term(MultiIndex{1}, 1e-300);
  EXPECT_EQ(p.num_terms(), 1u);
  p.add_term(MultiIndex{1}, -1e-300);
  EXPECT_TRUE(p.is_zero());
}

TEST(CoeffVector, ExampleOneFollowsTheExpansion) {
  const Eigen::VectorXd v = to_coeff_vector(example1(), MonomialBasis(2, 2));
  const Eigen::VectorXd want = (Eigen::VectorXd(6) << 9, 0, -4, 2, 1, 1).finished();
  EXPECT_EQ(v, want);
}

TEST(CoeffVector, TrivialCases) {
  const MonomialBasis b(2, 2);
  Eigen::VectorXd one = Eigen::VectorXd::Zero(6);
  one[0] = 1;
  EXPECT_EQ(to_coeff_vector(Polynomial::constant(2, 1.0), b), one);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(6);
  sq[3] = 1;
  const Polynomial x1 = Polynomial::variable(2, 0);
  EXPECT_EQ(to_coeff_vector(x1 * x1, b), sq);
}

TEST(CoeffVector, DegreeExceedsBasis) {
  const Polynomial x1 = Polynomial::variable(2, 0);
  EXPECT_THROW(to_coeff_vector(x1 * x1 * x1, MonomialBasis(2, 2)), DegreeError);
  EXPECT_THROW(to_coeff_vector(x1, MonomialBasis(3, 2)), DimensionError);
}

TEST(Properties, CoefficientRoundTripEvaluation) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const unsigned deg = trial % 7;
    const Polynomial p = oracle::random_polynomial(rng, n, deg);
    const MonomialBasis b(n, deg);
    const Polynomial q = from_coeff_vector(to_coeff_vector(p, b), b);
    const auto x = oracle::random_point(rng, n, -2, 2);
    const double direct = oracle::eval_terms(p, x);
    EXPECT_NEAR(q(std::span<const double>(x)), direct, 1e-12 * std::max(1.0, std::abs(direct)));
    EXPECT_NEAR(p(std::span<const double>(x)), direct, 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Properties, ProductEvaluatesToProduct) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const Polynomial p = oracle::random_polynomial(rng, n, trial % 4);
    const Polynomial q = oracle::random_polynomial(rng, n, (trial / 4) % 4);
    const auto x = oracle::random_point(rng, n, -2, 2);
    const double want = oracle::eval_terms(p, x) * oracle::eval_terms(q, x);
    EXPECT_NEAR(oracle::eval_terms(poly_mul(p, q), x), want, 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST(Substitution, AffineMapMatchesComposition) {
  std::mt19937_64 rng(3);
  const Polynomial p = oracle::random_polynomial(rng, 2, 3);
  const std::array<double, 2> c{10.5, -3.0}, r{9.5, 0.25};
  const Polynomial q = affine_substitute(p, c, r);
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 2, -1, 1);
    const std::vector<double> x{c[0] + r[0] * u[0], c[1] + r[1] * u[1]};
    const double want = oracle::eval_terms(p, x);
    EXPECT_NEAR(oracle::eval_terms(q, u), want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(Printing, ReadableForm) {
  EXPECT_EQ(Polynomial::constant(2, 0.0).str(), "0");
  EXPECT_FALSE(example1().str().empty());
  EXPECT_EQ(example1().degree(), 2u);
}
