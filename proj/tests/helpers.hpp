#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tagrec/folksonomy.hpp"
#include "tagrec/topics.hpp"

namespace testutil {

using namespace tagrec;

struct Row {
  std::string user;
  std::string resource;
  std::vector<std::string> tags;
  Timestamp ts;
};

/// Builds a folksonomy straight from string-level posts, interning in the
/// given order.
inline Folksonomy make_folksonomy(const std::vector<Row>& rows) {
  std::vector<RawPost> raw;
  for (const auto& r : rows) raw.push_back({r.user, r.resource, r.tags, r.ts});
  auto vocab = std::make_shared<Vocabularies>();
  auto posts = intern_posts(raw, *vocab);
  return Folksonomy(vocab, std::move(posts));
}

inline TagId tag(const Folksonomy& f, const std::string& name) {
  return make_id<TagId>(*f.vocab().tags.find(name));
}
inline UserId user(const Folksonomy& f, const std::string& name) {
  return make_id<UserId>(*f.vocab().users.find(name));
}
inline ResourceId resource(const Folksonomy& f, const std::string& name) {
  return make_id<ResourceId>(*f.vocab().resources.find(name));
}

inline std::vector<std::string> tag_names(const Folksonomy& f, const RankedTags& ranked) {
  std::vector<std::string> out;
  for (const auto& s : ranked) out.push_back(f.vocab().tag_name(s.tag));
  return out;
}

inline Folksonomy ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest(in);
}

/// Two planted topics with disjoint 10-tag vocabularies ("a0".."a9" and
/// "b0".."b9"). Document d is resource "d<d>", drawn purely from topic d % 2
/// through 6 posts of 3 tags each.
struct PlantedCorpus {
  Folksonomy corpus;
  std::vector<int> topic_of_tag;  // by tag id
};

inline PlantedCorpus planted_corpus(std::uint64_t seed, std::size_t docs = 100) {
  std::mt19937_64 rng(seed);
  std::vector<Row> rows;
  for (std::size_t d = 0; d < docs; ++d) {
    const char prefix = d % 2 == 0 ? 'a' : 'b';
    for (int p = 0; p < 6; ++p) {
      std::vector<int> pool(10);
      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), rng);
      Row row{"u" + std::to_string(p), "d" + std::to_string(d), {}, static_cast<Timestamp>(d * 10 + p)};
      for (int i = 0; i < 3; ++i) row.tags.push_back(std::string(1, prefix) + std::to_string(pool[i]));
      rows.push_back(row);
    }
  }
  PlantedCorpus out{make_folksonomy(rows), {}};
  for (std::size_t t = 0; t < out.corpus.vocab().tags.size(); ++t)
    out.topic_of_tag.push_back(out.corpus.vocab().tags.name(t)[0] == 'a' ? 0 : 1);
  return out;
}

/// For each learned topic, the share of its 10 most probable tags that come
/// from the majority planted vocabulary, averaged over topics. Also reports
/// whether the learned topics cover both planted vocabularies.
inline double planted_purity(const TopicModel& model, const std::vector<int>& topic_of_tag,
                             bool* both_covered = nullptr) {
  double purity = 0.0;
  std::vector<int> majority;
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    const auto phi = model.phi(k);
    std::vector<std::size_t> order(phi.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return phi[a] > phi[b]; });
    int votes[2] = {0, 0};
    for (std::size_t i = 0; i < 10 && i < order.size(); ++i) ++votes[topic_of_tag[order[i]]];
    purity += std::max(votes[0], votes[1]) / 10.0;
    majority.push_back(votes[0] >= votes[1] ? 0 : 1);
  }
  if (both_covered)
    *both_covered = std::count(majority.begin(), majority.end(), 0) > 0 &&
                    std::count(majority.begin(), majority.end(), 1) > 0;
  return purity / static_cast<double>(model.num_topics());
}

}  // namespace testutil
