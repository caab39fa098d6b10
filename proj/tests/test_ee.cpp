#include <gtest/gtest.h>

#include <random>

#include "fracpoly/ee.hpp"
#include "oracles.hpp"

using namespace fracpoly;

namespace {

EEParams table_params() {
  EEParams p;
  p.gamma = 3;
  p.tau = 400;
  p.alpha = 3.7;
  p.snr = 1;
  return p;
}

Json synthetic_doc() { return Json::parse(read_text_file(oracle::data_file("ee-synthetic.json"))); }

EEProblem load_doc(const Json& doc) { return load_objective(parse_located(doc.dump(2), "cfg.json")); }

/// Brute-force reference over the integer grid, written independently of exhaustive_search.
struct BruteForce {
  long k = -1, m = -1;
  double ee = -std::numeric_limits<double>::infinity();
};

BruteForce brute_force(const EEProblem& p) {
  BruteForce b;
  for (long k = 1; k <= p.grid.k_max; ++k)
    for (long m = 1; m <= p.grid.m_max; ++m) {
      const std::vector<double> x{static_cast<double>(k), static_cast<double>(m)};
      if (oracle::eval_terms(p.h1, x) < 0 || oracle::eval_terms(p.h2, x) < 0) continue;
      const double v = oracle::eval_terms(p.f, x) / oracle::eval_terms(p.g, x);
      if (v > b.ee) b = {k, m, v};
    }
  return b;
}

}  // namespace

TEST(ConstraintCoeffs, ReferenceParameterSet) {
  const EEConstraints h = constraint_coeffs(table_params());
  EXPECT_EQ(h.h1.coeff(MultiIndex{0, 1}), 400.0);
  EXPECT_NEAR(h.h1.coeff(MultiIndex{1, 1}), -3.0 / 2.7, 1e-12);
  EXPECT_NEAR(h.h2.coeff(MultiIndex{0, 1}), 3.0 * (1.0 / 2.7 - 1.0), 1e-12);
  EXPECT_NEAR(h.h2.coeff(MultiIndex{0, 1}), -1.8889, 1e-4);
  EXPECT_NEAR(h.h1.coeff(MultiIndex{0, 0}), -3.0 * 400.0 * (1.0 + 2.0 / 1.7), 1e-9);
}

TEST(ConstraintCoeffs, SupportShape) {
  const EEConstraints h = constraint_coeffs(table_params());
  EXPECT_EQ(h.h1.degree(), 2u);
  EXPECT_EQ(h.h2.degree(), 1u);
  for (const auto& [a, c] : h.h1.terms())
    EXPECT_TRUE(a == MultiIndex({0, 0}) || a == MultiIndex({1, 0}) || a == MultiIndex({0, 1}) ||
                a == MultiIndex({1, 1}) || a == MultiIndex({2, 0}))
        << a.str();
  for (const auto& [a, c] : h.h2.terms()) EXPECT_LE(a.degree(), 1u) << a.str();
}

TEST(ConstraintCoeffs, SignStructure) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> gam(0.1, 10), tau(1, 1000), alpha(2.05, 6), snr(0.01, 100);
  for (int i = 0; i < 500; ++i) {
    EEParams p;
    p.gamma = gam(rng);
    p.tau = tau(rng);
    p.alpha = alpha(rng);
    p.snr = snr(rng);
    const EEConstraints h = constraint_coeffs(p);
    EXPECT_EQ(h.h1.coeff(MultiIndex{0, 1}), p.tau);
    EXPECT_LT(h.h1.coeff(MultiIndex{0, 0}), 0);
    EXPECT_GT(h.h2.coeff(MultiIndex{0, 0}), 0);
    EXPECT_LT(h.h2.coeff(MultiIndex{0, 1}), 0);
  }
}

TEST(ConstraintCoeffs, InvalidParameters) {
  EEParams p = table_params();
  p.alpha = 2.0;
  EXPECT_THROW(constraint_coeffs(p), std::invalid_argument);
  p = table_params();
  p.snr = 0;
  EXPECT_THROW(constraint_coeffs(p), std::invalid_argument);
}

TEST(Config, SyntheticAccepted) {
  const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  EXPECT_NEAR(p.params.snr, 1.0, 1e-15);
  EXPECT_EQ(p.grid.k_max, 40);
  EXPECT_EQ(p.grid.m_max, 300);
  EXPECT_FALSE(p.externally_sourced);
  EXPECT_EQ(ee_numerator_support().size() + ee_denominator_support().size(), 14u);
}

TEST(Config, RejectsMonomialOutsideSupport) {
  Json doc = synthetic_doc();
  doc["objective"]["f"]["(0,1)"] = 1.0;
  try {
    load_doc(doc);
    FAIL() << "accepted f(0,1)";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsMissingCoefficient) {
  Json doc = synthetic_doc();
  doc["objective"]["g"].erase("(1,2)");
  EXPECT_THROW(load_doc(doc), SchemaError);
}

TEST(Config, SnrUnits) {
  Json doc = synthetic_doc();
  doc["params"]["snr_unit"] = "decibel";
  EXPECT_THROW(load_doc(doc), SchemaError);
  doc["params"]["snr_unit"] = "dB";
  doc["params"]["snr"] = 10.0;
  EXPECT_NEAR(load_doc(doc).params.snr, 10.0, 1e-12);
  doc["params"]["snr_unit"] = "linear";
  doc["params"]["snr"] = 3.0;
  EXPECT_EQ(load_doc(doc).params.snr, 3.0);
  doc["params"].erase("snr_unit");
  EXPECT_THROW(load_doc(doc), SchemaError);
}

TEST(Config, RejectsNonPositiveDenominator) {
  Json doc = synthetic_doc();
  doc["objective"]["g"]["(0,0)"] = -1000.0;
  EXPECT_THROW(load_doc(doc), SchemaError);
}

TEST(Config, GridDefaultsAndValidation) {
  Json doc = synthetic_doc();
  doc["grid"].erase("K_max");
  EXPECT_EQ(load_doc(doc).grid.k_max, 400);
  doc["grid"]["M_max"] = 0;
  EXPECT_THROW(load_doc(doc), SchemaError);
  doc = synthetic_doc();
  doc["externally_sourced"] = true;
  EXPECT_TRUE(load_doc(doc).externally_sourced);
}

TEST(Search, MatchesBruteForce) {
  const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  const GridOptimum g = exhaustive_search(p);
  const BruteForce b = brute_force(p);
  EXPECT_EQ(g.k, b.k);
  EXPECT_EQ(g.m, b.m);
  EXPECT_NEAR(g.ee, b.ee, 1e-14 * b.ee);
  EXPECT_EQ(g.k, 18);
  EXPECT_EQ(g.m, 180);
}

TEST(Search, ConstantRatioTieBreak) {
  EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  p.f = Polynomial::constant(2, 1.0);
  p.g = Polynomial::constant(2, 4.0);
  long k0 = -1, m0 = -1;
  for (long k = 1; k <= p.grid.k_max && k0 < 0; ++k)
    for (long m = 1; m <= p.grid.m_max; ++m)
      if (p.feasible(static_cast<double>(k), static_cast<double>(m))) {
        k0 = k, m0 = m;
        break;
      }
  const GridOptimum g = exhaustive_search(p);
  EXPECT_EQ(g.k, k0);
  EXPECT_EQ(g.m, m0);
  EXPECT_EQ(g.ee, 0.25);
}

TEST(Search, SingleFeasiblePoint) {
  EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  const Polynomial K = Polynomial::variable(2, 0), M = Polynomial::variable(2, 1);
  p.h1 = -(poly_pow(K - Polynomial::constant(2, 3.0), 2) + poly_pow(M - Polynomial::constant(2, 5.0), 2));
  p.h2 = Polynomial::constant(2, 1.0);
  const GridOptimum g = exhaustive_search(p);
  EXPECT_EQ(g.k, 3);
  EXPECT_EQ(g.m, 5);
  EXPECT_EQ(g.feasible_points, 1u);
  p.h2 = Polynomial::constant(2, -1.0);
  EXPECT_THROW(exhaustive_search(p), EmptyFeasibleGrid);
}

TEST(Grid, CsvRowsCoverBox) {
  const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  const auto grid = evaluate_grid(p);
  ASSERT_EQ(grid.size(), 40u * 300u);
  EXPECT_EQ(grid.front().k, 1);
  EXPECT_EQ(grid.front().m, 1);
  EXPECT_EQ(grid.back().k, 40);
  EXPECT_EQ(grid.back().m, 300);
}

TEST(Solve, SyntheticMatchesOracle) {
  const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  EEOptions o;
  o.oracle = true;
  const EEResult r = solve_ee(p, o);
  const BruteForce b = brute_force(p);
  ASSERT_TRUE(r.feasible);
  ASSERT_TRUE(r.oracle);
  EXPECT_EQ(r.oracle->k, b.k);
  EXPECT_EQ(r.oracle->m, b.m);
  EXPECT_LE(std::abs(1.0 - r.ee_round / b.ee), 1e-3);
  EXPECT_GE(r.ee_round, (1 - 1e-3) * b.ee);
  ASSERT_TRUE(r.epsilon);
  EXPECT_LE(std::abs(*r.epsilon), 1e-3);
  EXPECT_EQ(r.dinkelbach.status, DinkelbachStatus::Converged);
  EXPECT_LT(r.dinkelbach.trace.size(), 10u);
  EXPECT_EQ(r.epsilon_trace.size(), r.dinkelbach.trace.size());
  EXPECT_NEAR(r.ee_cont, p.ee(r.k_cont, r.m_cont), 1e-12);
  EXPECT_EQ(r.dinkelbach.order, 6u);
}

TEST(Solve, ObjectiveScalingInvariance) {
  const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  EEProblem q = p;
  q.f = poly_scale(p.f, 2.0);
  const EEResult a = solve_ee(p), b = solve_ee(q);
  EXPECT_EQ(a.k_round, b.k_round);
  EXPECT_EQ(a.m_round, b.m_round);
  EXPECT_NEAR(b.ee_round, 2.0 * a.ee_round, 1e-12 * b.ee_round);
}

TEST(Solve, ScaledProblemHasBoxConstraints) {
  const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
  double scale = 0;
  const FractionalProblem fp = scaled_fractional(p, &scale);
  EXPECT_GT(scale, 0);
  EXPECT_EQ(fp.constraints.size(), 4u);
  // the map sends (K, M) = (1, 1) to u = (-1, -1)
  const std::array<double, 2> corner{-1, -1};
  const std::array<double, 2> km{1, 1};
  EXPECT_NEAR(fp.numerator(corner) / fp.denominator(corner), p.ee(1, 1), 1e-12);
  EXPECT_NEAR(fp.denominator(corner) * scale, p.g(km), 1e-9 * p.g(km));
}
