#pragma once

#include <cstdint>
#include <vector>

#include "tagrec/folksonomy.hpp"

namespace tagrec {

/// Planted-topic corpus with lexical drift: every user keeps a stable topic
/// profile while the tags they use for a topic come from a sliding window
/// over that topic's tag pool. Resources belong to exactly one topic and are
/// shared between users.
struct DriftCorpusConfig {
  std::size_t users = 30;
  std::size_t posts_per_user = 60;
  std::size_t topics = 6;
  std::size_t tags_per_topic = 24;
  std::size_t resources_per_topic = 80;
  std::size_t window = 4;          // active tags per (user, topic)
  std::size_t tags_per_post = 3;
  std::size_t rotate_every = 3;    // posts between window shifts
  double secondary_topic_share = 0.2;
  double mean_gap_days = 2.0;
  std::uint64_t seed = 7;
};

/// Deterministic for a given config. Throws ConfigError on inconsistent sizes.
std::vector<RawPost> generate_drift_corpus(const DriftCorpusConfig& config);

/// Tag name used by the generator for tag j of topic z.
std::string planted_tag_name(std::size_t topic, std::size_t j);

}  // namespace tagrec
