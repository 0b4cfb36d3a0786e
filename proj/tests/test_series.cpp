#include "twostacks/estimate_table.hpp"
#include "twostacks/series.hpp"

#include <gtest/gtest.h>

#include "golden.hpp"

#include <random>
#include <sstream>

namespace ts = twostacks;
using ts::Integer;
using ts::Series;

namespace {

Series ints(std::initializer_list<long long> v) { return Series::from_integers("x", v); }

// s_n = sum_i C(n-1, i-1) t_i computed with a Pascal triangle built here.
std::vector<Integer> transform_by_pascal(const std::vector<Integer>& t) {
  std::vector<Integer> s(t.size());
  if (t.empty()) return s;
  s[0] = t[0];
  std::vector<Integer> row = {1};  // row n-1 of Pascal's triangle
  for (std::size_t n = 1; n < t.size(); ++n) {
    Integer acc = 0;
    for (std::size_t i = 1; i <= n; ++i) acc += row[i - 1] * t[i];
    s[n] = acc;
    std::vector<Integer> next(row.size() + 1, Integer(0));
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = (k < row.size() ? row[k] : Integer(0)) + (k ? row[k - 1] : Integer(0));
    row = next;
  }
  return s;
}

}  // namespace

TEST(BinomialTransform, Examples) {
  EXPECT_EQ(ts::binomial_transform(ints({1, 1, 1, 3})).exact, ints({1, 1, 2, 6}).exact);
  EXPECT_EQ(ts::binomial_transform(ints({1, 1, 0, 0, 0, 0})).exact, ints({1, 1, 1, 1, 1, 1}).exact);
  EXPECT_EQ(ts::inverse_binomial_transform(ints({1, 1, 2, 6, 24})).exact, ints({1, 1, 1, 3, 11}).exact);
  EXPECT_EQ(ts::inverse_binomial_transform(ints({1, 1, 1, 1, 1})).exact, ints({1, 1, 0, 0, 0}).exact);
}

TEST(BinomialTransform, MatchesPascalTriangle) {
  Series t{"t", {}, {}};
  for (auto v : ts::golden::kCoefficients) t.exact.emplace_back(v);
  EXPECT_EQ(ts::binomial_transform(t).exact, transform_by_pascal(t.exact));
}

TEST(BinomialTransform, RoundTripsRandomSequences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Series s{"r", {}, {}};
    const std::size_t len = 1 + rng() % 40;
    for (std::size_t i = 0; i < len; ++i) s.exact.emplace_back(rng() >> 2);
    EXPECT_EQ(ts::binomial_transform(ts::inverse_binomial_transform(s)).exact, s.exact);
    EXPECT_EQ(ts::inverse_binomial_transform(ts::binomial_transform(s)).exact, s.exact);
  }
}

TEST(BinomialTransform, IncrementAvoidingCountsFromReferenceArePositive) {
  Series s{"s", {}, {}};
  for (auto v : ts::golden::kCoefficients) s.exact.emplace_back(v);
  const Series t = ts::inverse_binomial_transform(s);
  EXPECT_EQ(t.exact[4], 11);
  for (const auto& v : t.exact) EXPECT_GT(v, 0);
}

TEST(SeriesFile, RoundTripWithComments) {
  std::istringstream in("# header\n1\n\n  2 \n# mid\n6\n");
  const Series s = ts::read_series(in);
  EXPECT_EQ(s.exact, ints({1, 2, 6}).exact);
  std::ostringstream out;
  ts::write_series(out, s);
  EXPECT_EQ(out.str(), "1\n2\n6\n");
}

TEST(SeriesFile, BadLinesAreInputFormatErrors) {
  std::istringstream in("1\n2.5\n");
  try {
    (void)ts::read_series(in);
    FAIL() << "expected InputFormat";
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.kind(), ts::ErrorKind::InputFormat);
  }
  EXPECT_THROW((void)ts::read_series_file("/nonexistent/series.txt"), ts::Error);
}

TEST(SeriesFile, ShippedCoefficientsMatchGolden) {
  const Series s = ts::read_series_file(std::string(TWOSTACKS_DATA_DIR) + "/coefficients.txt");
  ASSERT_EQ(s.exact.size(), ts::golden::kCoefficients.size());
  for (std::size_t n = 0; n < s.exact.size(); ++n) EXPECT_EQ(s.exact[n], ts::golden::kCoefficients[n]);
}

TEST(EstimateCsv, ShippedTablesMatchGolden) {
  const auto coeffs = ts::read_csv_file(std::string(TWOSTACKS_DATA_DIR) + "/predicted_coefficients.csv");
  const auto rats = ts::read_csv_file(std::string(TWOSTACKS_DATA_DIR) + "/predicted_ratios.csv");
  EXPECT_EQ(coeffs.size(), 19u);
  EXPECT_EQ(rats.size(), 30u);
  for (const auto& g : ts::golden::kPredictedCoefficients) {
    ASSERT_NE(coeffs.find(g.n), nullptr);
    EXPECT_EQ(coeffs.find(g.n)->value.convert_to<double>(), g.value);
  }
  for (const auto& g : ts::golden::kPredictedRatios) {
    ASSERT_NE(rats.find(g.n), nullptr);
    EXPECT_EQ(rats.find(g.n)->value.convert_to<double>(), g.value);
  }
  const auto ref = ts::read_csv_file(std::string(TWOSTACKS_DATA_DIR) + "/two_stacks_in_parallel_predicted.csv");
  EXPECT_EQ(ref.size(), 10u);
}

TEST(EstimateCsv, WriteReadRoundTrip) {
  ts::EstimateTable t;
  t.rows.push_back({20, ts::Real("4.764211695346e16"), ts::Real("9207000"), 208});
  t.rows.push_back({21, ts::Real("1.5"), ts::Real(0), 3});
  std::ostringstream out;
  ts::write_csv(out, t);
  EXPECT_EQ(out.str(),
            "n,value,std_dev,samples\n"
            "20,4.764211695346000e+16,9.207000000000000e+06,208\n"
            "21,1.500000000000000e+00,0.000000000000000e+00,3\n");
  std::istringstream in(out.str());
  const auto back = ts::read_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.rows[0].samples, 208u);
  EXPECT_EQ(ts::format_sci(back.rows[0].value), "4.764211695346000e+16");
}

TEST(EstimateCsv, MalformedInput) {
  std::istringstream no_header("20,1,2\n");
  EXPECT_THROW((void)ts::read_csv(no_header), ts::Error);
  std::istringstream short_row("n,value,std_dev\n20,1\n");
  EXPECT_THROW((void)ts::read_csv(short_row), ts::Error);
  std::istringstream bad_number("n,value,std_dev\n20,abc,1\n");
  EXPECT_THROW((void)ts::read_csv(bad_number), ts::Error);
}

TEST(TrimmedStats, DropsCeilFractionFromEachEnd) {
  std::vector<ts::Real> v;
  for (int i = 1; i <= 10; ++i) v.emplace_back(i);
  v.back() = 1000;
  const auto st = ts::trimmed_stats(v, 0.10);
  EXPECT_EQ(st.kept, 8u);
  EXPECT_EQ(st.mean, ts::Real(5.5));  // 2..9
  // Sample standard deviation of 2..9.
  EXPECT_NEAR(st.std_dev.convert_to<double>(), std::sqrt(6.0), 1e-12);
  EXPECT_EQ(ts::trimmed_stats({ts::Real(1), ts::Real(2), ts::Real(3)}, 0.15).kept, 1u);
  EXPECT_THROW((void)ts::trimmed_stats(v, 0.5), ts::Error);
}

TEST(TrimmedStats, PermutationInvariantAndStableUnderAddingTheMean) {
  std::mt19937 rng(3);
  std::normal_distribution<double> d(10, 2);
  std::vector<ts::Real> v;
  for (int i = 0; i < 41; ++i) v.emplace_back(d(rng));
  const auto base = ts::trimmed_stats(v, 0.10);
  auto shuffled = v;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto again = ts::trimmed_stats(shuffled, 0.10);
  EXPECT_EQ(base.mean, again.mean);
  EXPECT_EQ(base.std_dev, again.std_dev);
  // With no trimming, adding a copy of the mean leaves the mean unchanged.
  const auto plain = ts::trimmed_stats(v, 0.0);
  auto with_mean = v;
  with_mean.push_back(plain.mean);
  EXPECT_NEAR(ts::trimmed_stats(with_mean, 0.0).mean.convert_to<double>(), plain.mean.convert_to<double>(), 1e-12);
  // 41 -> 42 values keeps the trim count at 5 and the new value is central.
  auto trimmed_with_mean = v;
  trimmed_with_mean.push_back(base.mean);
  EXPECT_NEAR(ts::trimmed_stats(trimmed_with_mean, 0.10).mean.convert_to<double>(), base.mean.convert_to<double>(), 1e-12);
}
