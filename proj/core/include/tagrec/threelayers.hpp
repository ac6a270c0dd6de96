#pragma once

#include <span>
#include <string_view>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tagrec/folksonomy.hpp"
#include "tagrec/ranking.hpp"
#include "tagrec/topics.hpp"

namespace tagrec {

/// A bookmark as the hidden layer sees it: one row of the semantic matrix
/// (topic vector) and one row of the lexical matrix (tag set).
struct MemoryBookmark {
  std::vector<double> topics;
  std::vector<TagId> tags;
  Timestamp timestamp = 0;
};

/// One user's personomy as semantic (l x Z) and lexical (l x m) matrices.
///
/// Rows are in ascending timestamp order. The lexical matrix is stored
/// sparsely: each row lists local tag indices j in [0, m). A topic k "occurs"
/// in bookmark i when topics[k] >= threshold; topics that never occur are
/// treated as last used at the user's oldest bookmark.
class UserMemory {
 public:
  UserMemory() = default;
  /// threshold <= 0 selects 1 / num_topics.
  UserMemory(std::size_t num_topics, std::vector<MemoryBookmark> bookmarks,
             double topic_threshold = 0.0);

  std::size_t size() const noexcept { return rows_.size(); }           // l
  std::size_t num_topics() const noexcept { return num_topics_; }      // Z
  std::size_t num_tags() const noexcept { return tags_.size(); }       // m
  bool empty() const noexcept { return rows_.empty(); }

  std::span<const double> topics(std::size_t i) const { return rows_[i].topics; }
  std::span<const std::uint32_t> local_tags(std::size_t i) const { return rows_[i].local_tags; }
  Timestamp timestamp(std::size_t i) const { return rows_[i].timestamp; }

  TagId tag(std::size_t j) const { return tags_[j]; }
  std::optional<std::size_t> local_index(TagId t) const;

  Timestamp tag_last_use(std::size_t j) const { return tag_last_use_[j]; }
  Timestamp topic_last_use(std::size_t k) const { return topic_last_use_[k]; }
  double topic_threshold() const noexcept { return threshold_; }

 private:
  struct Row {
    std::vector<double> topics;
    std::vector<std::uint32_t> local_tags;
    Timestamp timestamp;
  };
  std::size_t num_topics_ = 0;
  double threshold_ = 0.0;
  std::vector<Row> rows_;
  std::vector<TagId> tags_;
  std::unordered_map<std::uint32_t, std::uint32_t> local_;
  std::vector<Timestamp> tag_last_use_;
  std::vector<Timestamp> topic_last_use_;
};

/// One memory row per training post of `user`; S_i is the resource's topic
/// vector (see resource_topics). Users without training posts get an empty
/// memory.
UserMemory build_memory(UserId user, const Folksonomy& train, const TopicModel& model,
                        double topic_threshold = 0.0);

/// Input-layer cue: the target resource's topics and the reference time.
struct Cue {
  std::vector<double> topics;
  Timestamp ref_time = 0;
};

/// Cosine between the cue and every semantic row; 0 when either norm is 0.
std::vector<double> cue_similarity(std::span<const double> cue, const UserMemory& memory);

/// A_i = Sim_i^3.
std::vector<double> activation(std::span<const double> similarity);

/// ln(delta^-d) = -d * ln(max(delta, 1)).
double base_level(double delta_seconds, double decay);

/// How the base-level term enters the time-aware variants as a factor.
enum class RecencyScale {
  /// exp(BLL) = max(delta, 1)^-d: positive, so recent items gain weight
  /// whatever their activation.
  power,
  /// BLL itself. It is <= 0, so a factor of it pushes strongly activated
  /// bookmarks furthest down.
  log,
};

std::string_view recency_name(RecencyScale s) noexcept;
std::optional<RecencyScale> parse_recency(std::string_view name) noexcept;

double recency_weight(double delta_seconds, double decay, RecencyScale scale);

/// Tag activations c_j (length m) for the three model variants.
///   3L:        c_j = sum_i L_ij * A_i
///   3LT_topic: c_j = sum_i L_ij * (sum_k S_ik * R(k)) * A_i
///   3LT_tag:   c_j = sum_i L_ij * R(j) * A_i
/// with R the recency weight of the topic's / tag's last use before ref_time.
std::vector<double> score_3l(const UserMemory& memory, const Cue& cue);
std::vector<double> score_3lt_topic(const UserMemory& memory, const Cue& cue, double decay = 0.5,
                                    RecencyScale scale = RecencyScale::power);
std::vector<double> score_3lt_tag(const UserMemory& memory, const Cue& cue, double decay = 0.5,
                                  RecencyScale scale = RecencyScale::power);

enum class ThreeLayersVariant { plain, topic_time, tag_time };

std::string_view variant_name(ThreeLayersVariant v) noexcept;

struct ThreeLayersConfig {
  ThreeLayersVariant variant = ThreeLayersVariant::tag_time;
  double beta = 0.5;
  double decay = 0.5;
  RecencyScale recency = RecencyScale::power;
};

/// beta * softmax(c) + (1 - beta) * softmax(|Y_r|), each component
/// normalized over its own support (the user's m tags and the resource's
/// tags respectively), top k over their union.
RankedTags recommend(const ThreeLayersConfig& config, const UserMemory& memory, const Cue& cue,
                     std::span<const TagCount> resource_tags, std::size_t k);

RankedTags recommend(const ThreeLayersConfig& config, const UserMemory& memory, const Cue& cue,
                     ResourceId resource, const Folksonomy& train, std::size_t k);

}  // namespace tagrec
