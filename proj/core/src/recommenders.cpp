#include "tagrec/recommenders.hpp"

#include <array>
#include <utility>

namespace tagrec {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 13> kNames{{
    {Algorithm::mp, "mp"},
    {Algorithm::mp_u, "mp-u"},
    {Algorithm::mp_r, "mp-r"},
    {Algorithm::mp_ur, "mp-ur"},
    {Algorithm::lda, "lda"},
    {Algorithm::cf, "cf"},
    {Algorithm::apr, "apr"},
    {Algorithm::folkrank, "folkrank"},
    {Algorithm::bllc, "bllc"},
    {Algorithm::girptm, "girptm"},
    {Algorithm::three_layers, "3l"},
    {Algorithm::three_layers_topic, "3lt-topic"},
    {Algorithm::three_layers_tag, "3lt-tag"},
}};

constexpr std::array<Algorithm, 13> kAll = [] {
  std::array<Algorithm, 13> a{};
  for (std::size_t i = 0; i < kNames.size(); ++i) a[i] = kNames[i].first;
  return a;
}();

}  // namespace

std::string_view algorithm_name(Algorithm a) noexcept {
  for (const auto& [alg, name] : kNames)
    if (alg == a) return name;
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (const auto& [alg, n] : kNames)
    if (n == name) return alg;
  return std::nullopt;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view csv) {
  std::vector<Algorithm> out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    const auto item = csv.substr(0, comma);
    if (!item.empty()) {
      auto a = parse_algorithm(item);
      if (!a) throw ConfigError("unknown algorithm '" + std::string(item) + "'");
      out.push_back(*a);
    }
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("no algorithms given");
  return out;
}

std::span<const Algorithm> all_algorithms() noexcept { return kAll; }

bool needs_topic_model(Algorithm a) noexcept {
  return a == Algorithm::lda || a == Algorithm::three_layers ||
         a == Algorithm::three_layers_topic || a == Algorithm::three_layers_tag;
}

RecommenderSuite::RecommenderSuite(const Folksonomy& train, const TopicModel* model,
                                   RecommenderParams params, std::span<const Algorithm> algorithms)
    : train_(train), model_(model), params_(params) {
  if (!(params_.beta >= 0.0 && params_.beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (params_.k == 0 || params_.k > kMaxCutoff) throw ConfigError("k must lie in [1, 10]");
  if (params_.cf_neighbors == 0) throw ConfigError("CF neighbourhood size must be at least 1");
  bool graph = false;
  for (Algorithm a : algorithms) {
    if (needs_topic_model(a) && model_ == nullptr)
      throw ConfigError("algorithm '" + std::string(algorithm_name(a)) + "' needs a topic model");
    graph |= a == Algorithm::apr || a == Algorithm::folkrank;
  }
  if (graph) {
    graph_ = FolkGraph::from_folksonomy(train_);
    uniform_run_ =
        pagerank_rank(graph_, query_preference(graph_, std::nullopt, std::nullopt), params_.pagerank);
    have_graph_ = true;
  }
}

RankedTags RecommenderSuite::recommend(Algorithm a, const Post& q) const {
  const std::size_t k = params_.k;
  auto three_layers = [&](ThreeLayersVariant v) {
    const auto memory = build_memory(q.user, train_, *model_, params_.topic_threshold);
    const Cue cue{resource_topics(*model_, train_, q.resource), q.timestamp};
    return tagrec::recommend({v, params_.beta, params_.decay, params_.recency}, memory, cue, q.resource, train_, k);
  };
  switch (a) {
    case Algorithm::mp: return most_popular(train_, k);
    case Algorithm::mp_u: return most_popular_user(train_, q.user, k);
    case Algorithm::mp_r: return most_popular_resource(train_, q.resource, k);
    case Algorithm::mp_ur:
      return most_popular_user_resource(train_, q.user, q.resource, params_.beta, k);
    case Algorithm::lda: return lda_recommend(*model_, train_, q.resource, k);
    case Algorithm::cf:
      return collaborative_filtering(train_, q.user, q.resource, params_.cf_neighbors, k);
    case Algorithm::apr:
      if (!have_graph_) throw ConfigError("suite was built without the folksonomy graph");
      return adapted_pagerank(graph_, train_, q.user, q.resource, k, params_.pagerank);
    case Algorithm::folkrank:
      if (!have_graph_) throw ConfigError("suite was built without the folksonomy graph");
      return folkrank(graph_, train_, q.user, q.resource, k, params_.pagerank, &uniform_run_);
    case Algorithm::bllc:
      return bll_c(train_, q.user, q.resource, q.timestamp, params_.decay, params_.beta, k);
    case Algorithm::girptm:
      return girptm(train_, q.user, q.resource, q.timestamp, params_.beta, k);
    case Algorithm::three_layers: return three_layers(ThreeLayersVariant::plain);
    case Algorithm::three_layers_topic: return three_layers(ThreeLayersVariant::topic_time);
    case Algorithm::three_layers_tag: return three_layers(ThreeLayersVariant::tag_time);
  }
  return {};
}

std::vector<NamedRecommender> RecommenderSuite::named(std::span<const Algorithm> algorithms) const {
  std::vector<NamedRecommender> out;
  for (Algorithm a : algorithms)
    out.push_back({std::string(algorithm_name(a)), [this, a](const Post& p) { return recommend(a, p); }});
  return out;
}

}  // namespace tagrec
