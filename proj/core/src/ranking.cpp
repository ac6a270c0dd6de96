#include "tagrec/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tagrec {

std::vector<double> softmax_normalize(std::span<const double> raw) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  const double hi = *std::max_element(raw.begin(), raw.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::exp(raw[i] - hi);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

RankedTags rank_top_k(std::vector<ScoredTag> scores, std::size_t k) {
  auto before = [](const ScoredTag& a, const ScoredTag& b) {
    if (a.score != b.score) return a.score > b.score;
    return idx(a.tag) < idx(b.tag);
  };
  if (k < scores.size()) {
    std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k),
                      scores.end(), before);
    scores.resize(k);
  } else {
    std::sort(scores.begin(), scores.end(), before);
  }
  return scores;
}

RankedTags mix_components(std::span<const ScoredTag> first, std::span<const ScoredTag> second,
                          double beta, std::size_t k) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  std::map<TagId, double> combined;
  auto add = [&](std::span<const ScoredTag> component, double weight) {
    std::vector<double> raw;
    raw.reserve(component.size());
    for (const auto& s : component) raw.push_back(s.score);
    const auto norm = softmax_normalize(raw);
    for (std::size_t i = 0; i < component.size(); ++i)
      combined[component[i].tag] += weight * norm[i];
  };
  add(first, beta);
  add(second, 1.0 - beta);
  std::vector<ScoredTag> scores;
  scores.reserve(combined.size());
  for (auto [tag, score] : combined) scores.push_back({tag, score});
  return rank_top_k(std::move(scores), k);
}

std::vector<ScoredTag> as_scores(std::span<const TagCount> counts) {
  std::vector<ScoredTag> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back({c.tag, static_cast<double>(c.count)});
  return out;
}

}  // namespace tagrec
