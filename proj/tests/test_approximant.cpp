#include "twostacks/approximant.hpp"
#include "twostacks/linear_solve.hpp"

#include <gtest/gtest.h>

#include "golden.hpp"

#include <array>
#include <random>

namespace ts = twostacks;
using ts::Integer;
using ts::Rational;
using ts::Real;
using ts::Series;

namespace {

Series golden_series(std::size_t count) {
  Series s{"s", {}, {}};
  for (std::size_t n = 0; n < count; ++n) s.exact.emplace_back(ts::golden::kCoefficients[n]);
  return s;
}

Series catalan(std::size_t count) {
  Series s{"catalan", {}, {}};
  for (unsigned n = 0; n < count; ++n) s.exact.push_back(ts::binomial(2 * n, n) / (n + 1));
  return s;
}

Series central_binomial(std::size_t count) {
  Series s{"central", {}, {}};
  for (unsigned n = 0; n < count; ++n) s.exact.push_back(ts::binomial(2 * n, n));
  return s;
}

double rel(const Real& got, const Real& want) { return Real(abs(got - want) / abs(want)).convert_to<double>(); }

// Gauss-Jordan over the rationals; the reference for the fraction-free solver.
std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m[p][k] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(m[p], m[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m[i][k] == 0) continue;
      const Rational f = m[i][k] / m[k][k];
      for (std::size_t j = k; j <= n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
  return x;
}

const std::array<int, 3> kOrders234 = {2, 3, 4};

}  // namespace

TEST(SolveExact, AgreesWithRationalElimination) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    ts::IntegerMatrix a(n, n);
    std::vector<Integer> b(n);
    std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(n + 1));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        // Sparse small entries so singular systems turn up too.
        const int v = rng() % 3 == 0 ? 0 : static_cast<int>(rng() % 19) - 9;
        a(r, c) = v;
        aug[r][c] = v;
      }
      b[r] = static_cast<int>(rng() % 41) - 20;
      aug[r][n] = b[r];
    }
    EXPECT_EQ(ts::solve_exact(a, b), solve_rational(aug)) << "trial " << trial;
  }
}

TEST(SolveConsistent, SolvesWheneverASolutionExists) {
  std::mt19937 rng(9);
  std::size_t singular_consistent = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    ts::IntegerMatrix a(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) a(r, c) = rng() % 2 == 0 ? 0 : static_cast<int>(rng() % 7) - 3;
    // b = A x0 for integer x0 keeps the system consistent.
    std::vector<Integer> x0(n), b(n, Integer(0));
    for (auto& v : x0) v = static_cast<int>(rng() % 9) - 4;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) b[r] += a(r, c) * x0[c];
    const auto x = ts::solve_consistent(a, b);
    ASSERT_TRUE(x.has_value());
    for (std::size_t r = 0; r < n; ++r) {
      Rational acc = 0;
      for (std::size_t c = 0; c < n; ++c) acc += Rational(a(r, c)) * (*x)[c];
      ASSERT_EQ(acc, Rational(b[r]));
    }
    if (const auto exact = ts::solve_exact(a, b)) EXPECT_EQ(*exact, *x);
    else ++singular_consistent;
  }
  EXPECT_GT(singular_consistent, 10u);
}

TEST(SolveConsistent, InconsistentSystem) {
  ts::IntegerMatrix a(2, 2);
  a(0, 0) = 1, a(0, 1) = 2, a(1, 0) = 2, a(1, 1) = 4;
  EXPECT_TRUE(ts::solve_consistent(a, {Integer(1), Integer(2)}).has_value());
  EXPECT_FALSE(ts::solve_consistent(a, {Integer(1), Integer(3)}).has_value());
}

TEST(SolveExact, SingularMatrix) {
  ts::IntegerMatrix a(2, 2);
  a(0, 0) = 1, a(0, 1) = 2, a(1, 0) = 2, a(1, 1) = 4;
  EXPECT_FALSE(ts::solve_exact(a, {Integer(1), Integer(2)}).has_value());
}

TEST(GenerateConfigs, EveryConfigUsesTheWholeSeries) {
  for (int order = 1; order <= 4; ++order) {
    for (std::size_t length : {8u, 15u, 20u}) {
      const auto cfgs = ts::generate_configs(order, length);
      EXPECT_TRUE(std::is_sorted(cfgs.begin(), cfgs.end()));
      EXPECT_EQ(std::adjacent_find(cfgs.begin(), cfgs.end()), cfgs.end());
      for (const auto& c : cfgs) {
        ASSERT_TRUE(c.is_valid()) << ts::to_string(c);
        EXPECT_EQ(c.coefficients_used(), length) << ts::to_string(c);
        const auto [lo, hi] = std::minmax_element(c.q_degrees.begin(), c.q_degrees.end());
        EXPECT_LE(*hi - *lo, 2);
        EXPECT_LE(c.p_degree, 4);
      }
    }
  }
  EXPECT_FALSE(ts::generate_configs(4, 20).empty());
}

TEST(FitDa, GeometricSeriesFromFirstOrder) {
  // F = 1/(1 - 3z) satisfies (1 - 3z) theta F - 3z F = 0.
  Series s{"geometric", {}, {}};
  Integer v = 1;
  for (int n = 0; n < 6; ++n, v *= 3) s.exact.push_back(v);
  const auto da = ts::fit_da(s, ts::DAConfig{1, {1, 1}, -1});
  const auto next = ts::predict_coefficients(da, 5);
  ASSERT_EQ(da.fitted_upto, 2u);
  for (std::size_t i = 0; i < next.size(); ++i) {
    v = 1;
    for (std::size_t e = 0; e < 3 + i; ++e) v *= 3;
    EXPECT_EQ(next[i], Rational(v));
  }
}

TEST(FitDa, CentralBinomialNextTerm) {
  const Series s = central_binomial(15);
  const auto cfgs = ts::generate_configs(kOrders234, 15);
  const auto table = ts::predict_ensemble(s, cfgs, 1);
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.rows[0].n, 15u);
  EXPECT_LT(rel(table.rows[0].value, Real(155117520)), 1e-9);
}

TEST(FitDa, CatalanNextTenAreExact) {
  const Series s = catalan(20);
  const Series full = catalan(30);
  const auto table = ts::predict_ensemble(s, ts::generate_configs(kOrders234, 20), 10);
  ASSERT_EQ(table.size(), 10u);
  for (const auto& row : table.rows) {
    EXPECT_LT(rel(row.value, Real(full.exact[row.n])), 1e-12) << "n = " << row.n;
    EXPECT_LT(row.std_dev / row.value, Real(1e-12)) << "n = " << row.n;
  }
  const auto rats = ts::predict_ratios_ensemble(s, ts::generate_configs(kOrders234, 20), 10);
  for (const auto& row : rats.rows) {
    const Real want = Real(full.exact[row.n]) / Real(full.exact[row.n - 1]);
    EXPECT_LT(rel(row.value, want), 1e-12) << "n = " << row.n;
  }
}

TEST(FitDa, ReexpansionReproducesTheFittedCoefficients) {
  const Series s = golden_series(20);
  const auto cfgs = ts::generate_configs(4, 20);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < cfgs.size(); i += 7) {
    ts::DifferentialApproximant da;
    try {
      da = ts::fit_da(s, cfgs[i]);
    } catch (const ts::Error& e) {
      ASSERT_EQ(e.kind(), ts::ErrorKind::SingularFit);
      continue;
    }
    ASSERT_EQ(da.fitted_upto, 19u);
    const auto again = ts::reexpand(da);
    for (std::size_t k = 0; k <= da.fitted_upto; ++k) ASSERT_EQ(again[k], Rational(s.exact[k])) << ts::to_string(cfgs[i]);
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}

TEST(FitDa, FourthOrderFitExistsForTheSeries) {
  const Series s = golden_series(20);
  std::size_t fitted = 0;
  for (const auto& c : ts::generate_configs(4, 20)) {
    try {
      (void)ts::fit_da(s, c);
      ++fitted;
    } catch (const ts::Error&) {
    }
  }
  EXPECT_GT(fitted, 0u);
}

TEST(FitDa, SingularAndInvalidInputs) {
  // With a_0 = a_1 = 1, Q_1(0) = 1 forces q_00 = 0 at k = 0 and q_00 = -1 at
  // k = 1, and Q_0(0) = 1 gives 1 = 0 at k = 0.
  const Series ones = Series::from_integers("ones", {1, 1});
  try {
    (void)ts::fit_da(ones, ts::DAConfig{1, {0, 1}, -1});
    FAIL() << "expected SingularFit";
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.kind(), ts::ErrorKind::SingularFit);
  }
  EXPECT_THROW((void)ts::fit_da(golden_series(5), ts::DAConfig{2, {2, 2, 2}, 0}), ts::Error);
  EXPECT_THROW((void)ts::fit_da(golden_series(20), ts::DAConfig{2, {2, 2}, 0}), ts::Error);
}

TEST(PredictCoefficients, BreaksDownWhereTheLeadingFactorVanishes) {
  // Q_0 = -5, Q_1 = 1 gives the leading factor k - 5.
  ts::DifferentialApproximant da;
  da.config = ts::DAConfig{1, {0, 0}, -1};
  da.q = {{Rational(-5)}, {Rational(1)}};
  da.fitted_upto = 2;
  da.known = {Rational(1), Rational(1), Rational(1)};
  EXPECT_EQ(ts::predict_coefficients(da, 2).size(), 2u);
  try {
    (void)ts::predict_coefficients(da, 3);
    FAIL() << "expected RecurrenceBreakdown";
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.kind(), ts::ErrorKind::RecurrenceBreakdown);
  }
}

TEST(Ensemble, TooFewSurvivors) {
  const auto cfgs = ts::generate_configs(4, 20);
  const std::vector<ts::DAConfig> two(cfgs.begin(), cfgs.begin() + 2);
  try {
    (void)ts::predict_ensemble(golden_series(20), two, 1);
    FAIL() << "expected EnsembleTooSmall";
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.kind(), ts::ErrorKind::EnsembleTooSmall);
  }
}

TEST(Ensemble, IndependentOfWorkerCount) {
  const Series s = golden_series(18);
  const auto cfgs = ts::generate_configs(3, 18);
  ts::EnsembleOptions one, three;
  three.workers = 3;
  const auto a = ts::predict_ensemble(s, cfgs, 4, one);
  const auto b = ts::predict_ensemble(s, cfgs, 4, three);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.rows[i].value, b.rows[i].value);
    EXPECT_EQ(a.rows[i].std_dev, b.rows[i].std_dev);
    EXPECT_EQ(a.rows[i].samples, b.rows[i].samples);
  }
}

TEST(Ensemble, HoldOutNineteenthCoefficient) {
  const auto table = ts::predict_ensemble(golden_series(19), ts::generate_configs(4, 19), 1);
  const Real want(ts::golden::kCoefficients[19]);
  EXPECT_LT(rel(table.rows[0].value, want), 1e-8);
  EXPECT_LE(abs(table.rows[0].value - want), 3 * table.rows[0].std_dev);
}

TEST(Ensemble, AccuracyDegradesWithOffset) {
  const auto table = ts::predict_ensemble(golden_series(14), ts::generate_configs(4, 14), 6);
  std::vector<double> err;
  for (const auto& row : table.rows) err.push_back(rel(row.value, Real(ts::golden::kCoefficients[row.n])));
  EXPECT_LT(err.front(), err.back());
  EXPECT_LT(err.front(), 1e-6);
}

class ReferenceTables : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const Series s = golden_series(20);
    const auto cfgs = ts::generate_configs(4, 20);
    coefficients_ = new ts::EstimateTable(ts::predict_ensemble(s, cfgs, 6));
    ratios_ = new ts::EstimateTable(ts::predict_ratios_ensemble(s, cfgs, 6));
  }
  static void TearDownTestSuite() {
    delete coefficients_;
    delete ratios_;
  }
  static ts::EstimateTable* coefficients_;
  static ts::EstimateTable* ratios_;
};
ts::EstimateTable* ReferenceTables::coefficients_ = nullptr;
ts::EstimateTable* ReferenceTables::ratios_ = nullptr;

TEST_F(ReferenceTables, CoefficientsWithinQuotedSpread) {
  for (const auto& g : ts::golden::kPredictedCoefficients) {
    const auto* row = coefficients_->find(g.n);
    ASSERT_NE(row, nullptr);
    EXPECT_LE(abs(row->value - Real(g.value)), 10 * Real(g.std_dev)) << "n = " << g.n;
  }
}

TEST_F(ReferenceTables, RatiosWithinQuotedSpread) {
  for (const auto& g : ts::golden::kPredictedRatios) {
    const auto* row = ratios_->find(g.n);
    ASSERT_NE(row, nullptr);
    EXPECT_LE(abs(row->value - Real(g.value)), 10 * Real(g.std_dev)) << "n = " << g.n;
  }
  EXPECT_NEAR(ratios_->find(20)->value.convert_to<double>(), 10.949014683, 1e-6);
}

TEST_F(ReferenceTables, RatioFirstAgreesWithCoefficientRatios) {
  // r_n from averaged coefficients versus the per-approximant ratio average.
  Real prev(ts::golden::kCoefficients[19]);
  Real prev_sd = 0;
  for (const auto& c : coefficients_->rows) {
    const auto* r = ratios_->find(c.n);
    ASSERT_NE(r, nullptr);
    const Real ratio = c.value / prev;
    const Real ratio_sd = ratio * sqrt(pow(c.std_dev / c.value, 2) + pow(prev_sd / prev, 2));
    const Real combined = sqrt(ratio_sd * ratio_sd + r->std_dev * r->std_dev);
    EXPECT_LE(abs(ratio - r->value), combined) << "n = " << c.n;
    prev = c.value;
    prev_sd = c.std_dev;
  }
}
