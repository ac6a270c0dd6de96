#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagrec/baselines.hpp"
#include "tagrec/evaluation.hpp"
#include "tagrec/threelayers.hpp"

namespace tagrec {

enum class Algorithm {
  mp,
  mp_u,
  mp_r,
  mp_ur,
  lda,
  cf,
  apr,
  folkrank,
  bllc,
  girptm,
  three_layers,
  three_layers_topic,
  three_layers_tag,
};

/// CLI names: mp, mp-u, mp-r, mp-ur, lda, cf, apr, folkrank, bllc, girptm,
/// 3l, 3lt-topic, 3lt-tag.
std::string_view algorithm_name(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;
/// Comma-separated list; throws ConfigError naming the first unknown entry.
std::vector<Algorithm> parse_algorithm_list(std::string_view csv);
std::span<const Algorithm> all_algorithms() noexcept;
bool needs_topic_model(Algorithm a) noexcept;

struct RecommenderParams {
  double beta = 0.5;
  double decay = 0.5;
  RecencyScale recency = RecencyScale::power;
  std::size_t k = 10;
  std::size_t cf_neighbors = 20;
  double topic_threshold = 0.0;  // <= 0: 1 / Z
  PageRankConfig pagerank;
};

/// Binds training data, an optional topic model and parameters, and answers
/// recommendation queries for test posts. Safe for concurrent queries once
/// constructed; the folksonomy graph and the uniform FolkRank run are built
/// eagerly when a graph algorithm is requested.
class RecommenderSuite {
 public:
  RecommenderSuite(const Folksonomy& train, const TopicModel* model, RecommenderParams params,
                   std::span<const Algorithm> algorithms);

  /// The test post supplies user, resource and reference time.
  RankedTags recommend(Algorithm a, const Post& query) const;

  std::vector<NamedRecommender> named(std::span<const Algorithm> algorithms) const;

  const RecommenderParams& params() const noexcept { return params_; }

 private:
  const Folksonomy& train_;
  const TopicModel* model_;
  RecommenderParams params_;
  FolkGraph graph_;
  PageRankResult uniform_run_;
  bool have_graph_ = false;
};

}  // namespace tagrec
