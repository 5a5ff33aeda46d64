#include "lnsim/netstats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lnsim::netstats {

std::optional<CorrelationMethod> parse_method(std::string_view name) {
  if (name == "spearman") return CorrelationMethod::kSpearman;
  if (name == "kendall") return CorrelationMethod::kKendall;
  if (name == "weighted_kendall") return CorrelationMethod::kWeightedKendall;
  return std::nullopt;
}

std::string_view to_string(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::kSpearman: return "spearman";
    case CorrelationMethod::kKendall: return "kendall";
    case CorrelationMethod::kWeightedKendall: return "weighted_kendall";
  }
  return "?";
}

void check_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (x.size() < 2) throw std::invalid_argument("correlation needs at least two pairs");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw std::invalid_argument("correlation input is not finite");
  }
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Additive weighted tau of (x, y) where element i weighs w(rank[i]); pairs
// weigh w(rank[i]) + w(rank[j]). Merge-sort count of discordant weight,
// with tie corrections for x, y and joint ties.
template <class Weight>
std::optional<double> ranked_tau(std::span<const double> x, std::span<const double> y, Weight weight) {
  const std::size_t n = x.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  // Sum of pair weights within runs of equal keys.
  const auto tied_weight = [&](auto same) {
    double total = 0, s = weight(perm[0]);
    std::size_t first = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (!same(perm[first], perm[i])) {
        total += s * static_cast<double>(i - first - 1);
        first = i;
        s = 0;
      }
      s += weight(perm[i]);
    }
    total += s * static_cast<double>(n - first - 1);
    return std::pair{total, first == 0};
  };

  const auto [t, joint_constant] = tied_weight([&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });
  const auto [u, x_constant] = tied_weight([&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  (void)joint_constant;
  if (x_constant) return std::nullopt;

  double exchanges = 0;
  std::vector<std::size_t> temp(n);
  // Sorts perm[offset, offset+length) by y, accumulating discordant weight.
  const auto weigh = [&](auto&& self, std::size_t offset, std::size_t length) -> double {
    if (length == 1) return weight(perm[offset]);
    const std::size_t length0 = length / 2;
    const std::size_t length1 = length - length0;
    const std::size_t middle = offset + length0;
    double residual = self(self, offset, length0);
    const double total = self(self, middle, length1) + residual;
    if (y[perm[middle - 1]] < y[perm[middle]]) return total;
    std::size_t i = 0, j = 0, k = 0;
    while (j < length0 && k < length1) {
      if (y[perm[offset + j]] <= y[perm[middle + k]]) {
        temp[i] = perm[offset + j];
        residual -= weight(temp[i]);
        ++j;
      } else {
        temp[i] = perm[middle + k];
        exchanges += weight(temp[i]) * static_cast<double>(length0 - j) + residual;
        ++k;
      }
      ++i;
    }
    std::copy(perm.begin() + static_cast<std::ptrdiff_t>(offset + j), perm.begin() + static_cast<std::ptrdiff_t>(middle),
              perm.begin() + static_cast<std::ptrdiff_t>(offset + i));
    std::copy(temp.begin(), temp.begin() + static_cast<std::ptrdiff_t>(i),
              perm.begin() + static_cast<std::ptrdiff_t>(offset));
    return total;
  };
  weigh(weigh, 0, n);

  const auto [v, y_constant] = tied_weight([&](std::size_t a, std::size_t b) { return y[a] == y[b]; });
  if (y_constant) return std::nullopt;

  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += weight(i);
  const double tot = s * static_cast<double>(n - 1);
  const double tau = ((tot - (v + u - t)) - 2.0 * exchanges) / std::sqrt(tot - u) / std::sqrt(tot - v);
  return std::clamp(tau, -1.0, 1.0);
}

// Hyperbolic weights of the ranks by decreasing (a, b).
std::vector<double> hyperbolic_weights(std::span<const double> a, std::span<const double> b) {
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] != a[j] ? a[i] < a[j] : b[i] < b[j];
  });
  std::vector<double> w(a.size());
  for (std::size_t r = 0; r < order.size(); ++r) w[order[order.size() - 1 - r]] = 1.0 / (1.0 + static_cast<double>(r));
  return w;
}

}  // namespace

RankCorrelation spearman(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return {CorrelationMethod::kSpearman, pearson(rx, ry), x.size()};
}

RankCorrelation kendall(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y);
  // Element weight 1/2 gives every pair weight 1, i.e. tau-b.
  return {CorrelationMethod::kKendall, ranked_tau(x, y, [](std::size_t) { return 0.5; }), x.size()};
}

RankCorrelation weighted_kendall(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y);
  const auto wx = hyperbolic_weights(x, y);
  const auto wy = hyperbolic_weights(y, x);
  const auto a = ranked_tau(x, y, [&](std::size_t i) { return wx[i]; });
  const auto b = ranked_tau(y, x, [&](std::size_t i) { return wy[i]; });
  RankCorrelation r{CorrelationMethod::kWeightedKendall, std::nullopt, x.size()};
  if (a && b) r.value = (*a + *b) / 2.0;
  return r;
}

RankCorrelation correlate(CorrelationMethod method, std::span<const double> x, std::span<const double> y) {
  switch (method) {
    case CorrelationMethod::kSpearman: return spearman(x, y);
    case CorrelationMethod::kKendall: return kendall(x, y);
    case CorrelationMethod::kWeightedKendall: return weighted_kendall(x, y);
  }
  throw std::invalid_argument("unknown correlation method");
}

std::pair<std::vector<double>, std::vector<double>> align(const NodeValues& a, const NodeValues& b) {
  std::pair<std::vector<double>, std::vector<double>> out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.first.push_back(ia->second);
      out.second.push_back(0.0);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      out.first.push_back(0.0);
      out.second.push_back(ib->second);
      ++ib;
    } else {
      out.first.push_back(ia->second);
      out.second.push_back(ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

std::vector<std::vector<std::optional<double>>> cross_day_correlations(std::span<const NodeValues> days,
                                                                       CorrelationMethod method) {
  if (days.size() < 2) throw std::invalid_argument("cross-day correlation needs at least two days");
  const std::size_t n = days.size();
  std::vector<std::vector<std::optional<double>>> m(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto [x, y] = align(days[i], days[j]);
      if (x.size() < 2) continue;
      m[i][j] = m[j][i] = correlate(method, x, y).value;
    }
  }
  return m;
}

std::optional<double> cross_run_correlation(std::span<const NodeValues> runs, CorrelationMethod method) {
  if (runs.size() < 2) throw std::invalid_argument("cross-run correlation needs at least two runs");
  double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const auto [x, y] = align(runs[i], runs[j]);
      if (x.size() < 2) continue;
      if (const auto v = correlate(method, x, y).value) {
        sum += *v;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

}  // namespace lnsim::netstats
