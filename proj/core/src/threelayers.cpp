#include "tagrec/threelayers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tagrec {

UserMemory::UserMemory(std::size_t num_topics, std::vector<MemoryBookmark> bookmarks,
                       double topic_threshold)
    : num_topics_(num_topics),
      threshold_(topic_threshold > 0.0 ? topic_threshold
                                       : 1.0 / static_cast<double>(std::max<std::size_t>(num_topics, 1))) {
  std::stable_sort(bookmarks.begin(), bookmarks.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  constexpr Timestamp kNever = std::numeric_limits<Timestamp>::min();
  topic_last_use_.assign(num_topics_, kNever);
  rows_.reserve(bookmarks.size());
  for (auto& b : bookmarks) {
    if (b.topics.size() != num_topics_) throw Error("bookmark topic vector has wrong length");
    Row row{std::move(b.topics), {}, b.timestamp};
    for (TagId t : b.tags) {
      auto [it, inserted] = local_.emplace(idx(t), static_cast<std::uint32_t>(tags_.size()));
      if (inserted) {
        tags_.push_back(t);
        tag_last_use_.push_back(b.timestamp);
      }
      const std::uint32_t j = it->second;
      if (std::find(row.local_tags.begin(), row.local_tags.end(), j) != row.local_tags.end())
        continue;
      row.local_tags.push_back(j);
      tag_last_use_[j] = std::max(tag_last_use_[j], b.timestamp);
    }
    for (std::size_t k = 0; k < num_topics_; ++k)
      if (row.topics[k] >= threshold_) topic_last_use_[k] = std::max(topic_last_use_[k], b.timestamp);
    rows_.push_back(std::move(row));
  }
  const Timestamp oldest = rows_.empty() ? 0 : rows_.front().timestamp;
  for (auto& ts : topic_last_use_)
    if (ts == kNever) ts = oldest;
}

std::optional<std::size_t> UserMemory::local_index(TagId t) const {
  if (auto it = local_.find(idx(t)); it != local_.end()) return it->second;
  return std::nullopt;
}

UserMemory build_memory(UserId user, const Folksonomy& train, const TopicModel& model,
                        double topic_threshold) {
  std::vector<MemoryBookmark> rows;
  for (std::size_t pi : train.user_posts(user)) {
    const Post& p = train.posts()[pi];
    rows.push_back({resource_topics(model, train, p.resource), p.tags, p.timestamp});
  }
  return UserMemory(model.num_topics(), std::move(rows), topic_threshold);
}

// ---------------------------------------------------------------------------

std::vector<double> cue_similarity(std::span<const double> cue, const UserMemory& memory) {
  std::vector<double> sim(memory.size(), 0.0);
  const double cue_norm = std::sqrt(std::inner_product(cue.begin(), cue.end(), cue.begin(), 0.0));
  if (cue_norm == 0.0) return sim;
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const auto s = memory.topics(i);
    const std::size_t n = std::min(cue.size(), s.size());
    double dot = 0.0, s_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) dot += cue[k] * s[k];
    for (double v : s) s_sq += v * v;
    if (s_sq > 0.0) sim[i] = dot / (cue_norm * std::sqrt(s_sq));
  }
  return sim;
}

std::vector<double> activation(std::span<const double> similarity) {
  std::vector<double> a(similarity.size());
  std::transform(similarity.begin(), similarity.end(), a.begin(),
                 [](double s) { return s * s * s; });
  return a;
}

double base_level(double delta_seconds, double decay) {
  return -decay * std::log(std::max(delta_seconds, 1.0));
}

double recency_weight(double delta_seconds, double decay, RecencyScale scale) {
  const double bll = base_level(delta_seconds, decay);
  return scale == RecencyScale::log ? bll : std::exp(bll);
}

namespace {

// c_j = sum_i L_ij * weight_i, the shared shape of all three variants once the
// per-bookmark factor is known.
std::vector<double> spread(const UserMemory& memory, std::span<const double> row_weight) {
  std::vector<double> c(memory.num_tags(), 0.0);
  for (std::size_t i = 0; i < memory.size(); ++i)
    for (std::uint32_t j : memory.local_tags(i)) c[j] += row_weight[i];
  return c;
}

}  // namespace

std::vector<double> score_3l(const UserMemory& memory, const Cue& cue) {
  const auto a = activation(cue_similarity(cue.topics, memory));
  return spread(memory, a);
}

std::vector<double> score_3lt_topic(const UserMemory& memory, const Cue& cue, double decay,
                                    RecencyScale scale) {
  auto a = activation(cue_similarity(cue.topics, memory));
  std::vector<double> topic_bll(memory.num_topics());
  for (std::size_t k = 0; k < memory.num_topics(); ++k)
    topic_bll[k] =
        recency_weight(static_cast<double>(cue.ref_time - memory.topic_last_use(k)), decay, scale);
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const auto s = memory.topics(i);
    double recency = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) recency += s[k] * topic_bll[k];
    a[i] *= recency;
  }
  return spread(memory, a);
}

std::vector<double> score_3lt_tag(const UserMemory& memory, const Cue& cue, double decay,
                                  RecencyScale scale) {
  auto c = score_3l(memory, cue);
  for (std::size_t j = 0; j < c.size(); ++j)
    c[j] *= recency_weight(static_cast<double>(cue.ref_time - memory.tag_last_use(j)), decay, scale);
  return c;
}

std::string_view recency_name(RecencyScale s) noexcept {
  return s == RecencyScale::log ? "log" : "power";
}

std::optional<RecencyScale> parse_recency(std::string_view name) noexcept {
  if (name == "log") return RecencyScale::log;
  if (name == "power") return RecencyScale::power;
  return std::nullopt;
}

std::string_view variant_name(ThreeLayersVariant v) noexcept {
  switch (v) {
    case ThreeLayersVariant::plain: return "3l";
    case ThreeLayersVariant::topic_time: return "3lt-topic";
    case ThreeLayersVariant::tag_time: return "3lt-tag";
  }
  return "?";
}

RankedTags recommend(const ThreeLayersConfig& config, const UserMemory& memory, const Cue& cue,
                     std::span<const TagCount> resource_tags, std::size_t k) {
  if (!(config.beta >= 0.0 && config.beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (k == 0) return {};
  std::vector<double> c;
  switch (config.variant) {
    case ThreeLayersVariant::plain: c = score_3l(memory, cue); break;
    case ThreeLayersVariant::topic_time: c = score_3lt_topic(memory, cue, config.decay, config.recency); break;
    case ThreeLayersVariant::tag_time: c = score_3lt_tag(memory, cue, config.decay, config.recency); break;
  }
  std::vector<ScoredTag> user_component(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) user_component[j] = {memory.tag(j), c[j]};
  const auto resource_component = as_scores(resource_tags);
  return mix_components(user_component, resource_component, config.beta, k);
}

RankedTags recommend(const ThreeLayersConfig& config, const UserMemory& memory, const Cue& cue,
                     ResourceId resource, const Folksonomy& train, std::size_t k) {
  return recommend(config, memory, cue, train.resource_tag_freq(resource), k);
}

}  // namespace tagrec
