#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "lnsim/netstats/correlation.hpp"
#include "lnsim/rng.hpp"
#include "testkit.hpp"

namespace lnsim::netstats {
namespace {

constexpr CorrelationMethod kAll[] = {CorrelationMethod::kSpearman, CorrelationMethod::kKendall,
                                      CorrelationMethod::kWeightedKendall};

TEST(Correlation, IdentityAndReversal) {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 3}, r{3, 2, 1};
  for (const auto m : kAll) {
    EXPECT_NEAR(*correlate(m, x, y).value, 1.0, 1e-12) << to_string(m);
    EXPECT_NEAR(*correlate(m, x, r).value, -1.0, 1e-12) << to_string(m);
    EXPECT_EQ(correlate(m, x, y).n, 3u);
  }
}

TEST(Correlation, ConstantVectorIsUndefined) {
  const std::vector<double> x{1, 2, 3}, c{4, 4, 4};
  for (const auto m : kAll) EXPECT_FALSE(correlate(m, x, c).value.has_value()) << to_string(m);
}

TEST(Correlation, BadInputRejected) {
  const std::vector<double> a{1, 2}, b{1, 2, 3}, one{1};
  EXPECT_THROW(check_pairs(a, b), std::invalid_argument);
  EXPECT_THROW(check_pairs(one, one), std::invalid_argument);
  const std::vector<double> nan{1, std::nan("")};
  EXPECT_THROW(spearman(nan, a), std::invalid_argument);
}

// Reference values computed with scipy.stats (kendalltau, spearmanr,
// weightedtau) 1.15.3.
TEST(Correlation, MatchesScipyWithTies) {
  const std::vector<double> x{0.3, 1.2, 5.0, 2.2, 2.2, 9.1, 0.0, 4.4, 7.7, 3.3};
  const std::vector<double> y{1.0, 0.5, 4.0, 2.0, 3.5, 8.0, 0.2, 4.4, 6.0, 1.5};
  EXPECT_NEAR(*kendall(x, y).value, 0.8090398349558905, 1e-12);
  EXPECT_NEAR(*spearman(x, y).value, 0.9361745372672995, 1e-12);
  EXPECT_NEAR(*weighted_kendall(x, y).value, 0.8789945027873445, 1e-12);

  const std::vector<double> a{12, 0, 0, 3, 7, 7, 1, 0, 25, 4, 9, 2};
  const std::vector<double> b{10, 1, 0, 0, 5, 9, 2, 0, 20, 6, 3, 2};
  EXPECT_NEAR(*kendall(a, b).value, 0.7258064516129031, 1e-12);
  EXPECT_NEAR(*spearman(a, b).value, 0.8647686832740212, 1e-12);
  EXPECT_NEAR(*weighted_kendall(a, b).value, 0.8212279731900163, 1e-12);
}

TEST(Correlation, MatchesPairCountingOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(30);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Small integer ranges force plenty of ties.
      x[i] = static_cast<double>(rng.uniform_below(trial % 2 == 0 ? 6 : 1000));
      y[i] = static_cast<double>(rng.uniform_below(trial % 3 == 0 ? 4 : 1000));
    }
    const auto k = kendall(x, y);
    const auto w = weighted_kendall(x, y);
    const bool defined = std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end() &&
                         std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) != y.end();
    ASSERT_EQ(k.value.has_value(), defined);
    if (!defined) continue;
    EXPECT_NEAR(*k.value, testkit::brute_force_kendall(x, y), 1e-12);
    EXPECT_NEAR(*w.value, testkit::brute_force_weighted_kendall(x, y), 1e-12);
    for (const auto m : kAll) {
      const auto v = *correlate(m, x, y).value;
      EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
  }
}

TEST(Correlation, WeightedFavoursTopAgreement) {
  // Same top ranks, scrambled tail: weighted tau exceeds plain tau.
  const std::vector<double> x{100, 90, 80, 70, 6, 5, 4, 3, 2, 1};
  const std::vector<double> y{100, 90, 80, 70, 1, 3, 5, 2, 6, 4};
  EXPECT_GT(*weighted_kendall(x, y).value, *kendall(x, y).value);
}

TEST(Correlation, ParseNames) {
  for (const auto m : kAll) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("pearson").has_value());
}

TEST(Alignment, UnionWithZeros) {
  const NodeValues a{{"x", 1}, {"y", 2}}, b{{"y", 5}, {"z", 7}};
  const auto [u, v] = align(a, b);
  EXPECT_EQ(u, (std::vector<double>{1, 2, 0}));
  EXPECT_EQ(v, (std::vector<double>{0, 5, 7}));
}

TEST(CrossDay, IdenticalDaysCorrelatePerfectly) {
  const NodeValues d{{"a", 3}, {"b", 1}, {"c", 2}, {"d", 9}};
  const std::vector<NodeValues> days{d, d, d};
  for (const auto m : kAll) {
    const auto mat = cross_day_correlations(days, m);
    ASSERT_EQ(mat.size(), 3u);
    for (const auto& row : mat) {
      for (const auto& v : row) EXPECT_NEAR(*v, 1.0, 1e-12);
    }
    EXPECT_NEAR(*cross_run_correlation(days, m), 1.0, 1e-12);
  }
}

TEST(CrossDay, SymmetricAndMeanOfPairs) {
  const std::vector<NodeValues> runs{{{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}},
                                     {{"a", 2}, {"b", 1}, {"c", 3}, {"d", 4}},
                                     {{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}}};
  const auto mat = cross_day_correlations(runs, CorrelationMethod::kKendall);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(mat[i][j], mat[j][i]);
  }
  const double mean = (*mat[0][1] + *mat[0][2] + *mat[1][2]) / 3;
  EXPECT_NEAR(*cross_run_correlation(runs, CorrelationMethod::kKendall), mean, 1e-12);
}

}  // namespace
}  // namespace lnsim::netstats
