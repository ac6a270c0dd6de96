#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tagrec/evaluation.hpp"

namespace tagrec {

namespace {

constexpr std::size_t kExactLimit = 12;

struct Pooled {
  std::vector<double> ranks;  // mid-ranks; first |x| entries belong to x
  double tie_term = 0.0;      // sum over tie groups of t^3 - t
};

Pooled pooled_ranks(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() + y.size();
  std::vector<double> values(x.begin(), x.end());
  values.insert(values.end(), y.begin(), y.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Pooled p;
  p.ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) p.ranks[order[m]] = mid;
    const double t = static_cast<double>(j - i + 1);
    p.tie_term += t * t * t - t;
    i = j + 1;
  }
  return p;
}

void check(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ConfigError("rank-sum test needs two non-empty samples");
}

bool all_identical(std::span<const double> x, std::span<const double> y) {
  const double v = x.front();
  return std::all_of(x.begin(), x.end(), [v](double a) { return a == v; }) &&
         std::all_of(y.begin(), y.end(), [v](double a) { return a == v; });
}

}  // namespace

double wilcoxon_rank_sum_exact(std::span<const double> x, std::span<const double> y) {
  check(x, y);
  if (all_identical(x, y)) return 1.0;
  const auto pooled = pooled_ranks(x, y);
  const std::size_t n = pooled.ranks.size();
  const std::size_t m = x.size();
  const double observed = std::accumulate(pooled.ranks.begin(), pooled.ranks.begin() + m, 0.0);
  const double expected = static_cast<double>(m) * static_cast<double>(n + 1) / 2.0;
  const double dev = std::abs(observed - expected);
  constexpr double eps = 1e-9;

  // Walk every m-subset of positions via a selection mask.
  std::vector<bool> select(n, false);
  std::fill(select.begin(), select.begin() + static_cast<std::ptrdiff_t>(m), true);
  std::size_t extreme = 0, total = 0;
  do {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (select[i]) w += pooled.ranks[i];
    if (std::abs(w - expected) >= dev - eps) ++extreme;
    ++total;
  } while (std::prev_permutation(select.begin(), select.end()));
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(total));
}

double wilcoxon_rank_sum_normal(std::span<const double> x, std::span<const double> y) {
  check(x, y);
  if (all_identical(x, y)) return 1.0;
  const auto pooled = pooled_ranks(x, y);
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  const double w = std::accumulate(pooled.ranks.begin(), pooled.ranks.begin() + x.size(), 0.0);
  const double mu = n1 * (n + 1.0) / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - pooled.tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(w - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y) {
  check(x, y);
  if (x.size() + y.size() <= kExactLimit) return wilcoxon_rank_sum_exact(x, y);
  return wilcoxon_rank_sum_normal(x, y);
}

}  // namespace tagrec
