#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lnsim::netstats {

enum class CorrelationMethod { kSpearman, kKendall, kWeightedKendall };

std::optional<CorrelationMethod> parse_method(std::string_view name);
std::string_view to_string(CorrelationMethod m);

struct RankCorrelation {
  CorrelationMethod method = CorrelationMethod::kSpearman;
  std::optional<double> value;  // absent when either vector is constant
  std::size_t n = 0;
};

/// Pearson correlation of average ranks.
RankCorrelation spearman(std::span<const double> x, std::span<const double> y);
/// Kendall tau-b, O(n log n).
RankCorrelation kendall(std::span<const double> x, std::span<const double> y);
/// Weighted tau with additive hyperbolic weights 1/(1+r), where r is the
/// rank by decreasing (x, y); averaged with the same quantity for (y, x).
RankCorrelation weighted_kendall(std::span<const double> x, std::span<const double> y);
RankCorrelation correlate(CorrelationMethod method, std::span<const double> x, std::span<const double> y);

/// Throws std::invalid_argument on length mismatch or fewer than two pairs.
void check_pairs(std::span<const double> x, std::span<const double> y);

using NodeValues = std::map<std::string, double>;

/// Vectors over the union of keys, a missing key counting as 0.
std::pair<std::vector<double>, std::vector<double>> align(const NodeValues& a, const NodeValues& b);

/// Symmetric matrix of correlations between every pair of days. The
/// diagonal holds 1 (or nothing for a constant day).
std::vector<std::vector<std::optional<double>>> cross_day_correlations(std::span<const NodeValues> days,
                                                                       CorrelationMethod method);

/// Mean of the defined pairwise correlations between runs; absent if none is.
std::optional<double> cross_run_correlation(std::span<const NodeValues> runs, CorrelationMethod method);

}  // namespace lnsim::netstats
