#include "tagrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace tagrec {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

std::string numbered(const char* pattern, std::size_t a, std::size_t b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

constexpr Timestamp kEpoch = 1'200'000'000;

}  // namespace

std::string planted_tag_name(std::size_t topic, std::size_t j) {
  return numbered("t%zu_%02zu", topic, j);
}

std::vector<RawPost> generate_drift_corpus(const DriftCorpusConfig& c) {
  if (c.topics < 1 || c.tags_per_topic < c.window || c.window < c.tags_per_post ||
      c.tags_per_post == 0 || c.rotate_every == 0 || c.resources_per_topic < c.posts_per_user)
    throw ConfigError("inconsistent synthetic corpus configuration");

  std::mt19937_64 rng(c.seed);
  std::vector<RawPost> posts;
  posts.reserve(c.users * c.posts_per_user);
  for (std::size_t u = 0; u < c.users; ++u) {
    const std::string user = numbered("u%03zu", u, 0);
    const std::size_t primary = u % c.topics;
    const std::size_t secondary =
        c.topics > 1 ? (primary + 1 + below(rng, c.topics - 1)) % c.topics : primary;
    std::vector<std::size_t> window_offset(c.topics);
    for (auto& o : window_offset) o = below(rng, c.tags_per_topic);
    std::vector<std::vector<bool>> used(c.topics, std::vector<bool>(c.resources_per_topic, false));

    double t = static_cast<double>(kEpoch) + uniform01(rng) * 30.0 * kSecondsPerDay;
    for (std::size_t i = 0; i < c.posts_per_user; ++i) {
      const std::size_t topic = uniform01(rng) < c.secondary_topic_share ? secondary : primary;

      std::size_t res = below(rng, c.resources_per_topic);
      while (used[topic][res]) res = (res + 1) % c.resources_per_topic;
      used[topic][res] = true;

      // Sliding lexical window for this topic.
      const std::size_t start = window_offset[topic] + i / c.rotate_every;
      std::vector<std::size_t> window(c.window);
      for (std::size_t w = 0; w < c.window; ++w) window[w] = (start + w) % c.tags_per_topic;
      for (std::size_t w = 0; w + 1 < c.window; ++w)
        std::swap(window[w], window[w + below(rng, c.window - w)]);

      RawPost p;
      p.user = user;
      p.resource = numbered("r%zu_%03zu", topic, res);
      for (std::size_t j = 0; j < c.tags_per_post; ++j)
        p.tags.push_back(planted_tag_name(topic, window[j]));
      p.timestamp = static_cast<Timestamp>(t);
      posts.push_back(std::move(p));

      const double gap = -std::log(1.0 - uniform01(rng)) * c.mean_gap_days * kSecondsPerDay;
      t += std::max(gap, 60.0);
    }
  }
  return posts;
}

}  // namespace tagrec
