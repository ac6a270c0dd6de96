#include "tagrec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace tagrec {

namespace {

RankedTags rank_counts(std::span<const TagCount> counts, std::size_t k) {
  return rank_top_k(as_scores(counts), k);
}

double cosine(std::span<const TagCount> a, std::span<const TagCount> b) {
  // Both sorted by tag id.
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& x : a) na += double(x.count) * x.count;
  for (const auto& x : b) nb += double(x.count) * x.count;
  if (na == 0.0 || nb == 0.0) return 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (idx(i->tag) < idx(j->tag)) {
      ++i;
    } else if (idx(j->tag) < idx(i->tag)) {
      ++j;
    } else {
      dot += double(i->count) * j->count;
      ++i;
      ++j;
    }
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<ScoredTag> from_map(const std::map<TagId, double>& m) {
  std::vector<ScoredTag> out;
  out.reserve(m.size());
  for (auto [t, s] : m) out.push_back({t, s});
  return out;
}

}  // namespace

RankedTags most_popular(const Folksonomy& train, std::size_t k) {
  std::vector<ScoredTag> scores;
  const auto freq = train.tag_freq();
  for (std::size_t t = 0; t < freq.size(); ++t)
    if (freq[t] > 0) scores.push_back({make_id<TagId>(t), static_cast<double>(freq[t])});
  return rank_top_k(std::move(scores), k);
}

RankedTags most_popular_user(const Folksonomy& train, UserId user, std::size_t k) {
  return rank_counts(train.user_tag_freq(user), k);
}

RankedTags most_popular_resource(const Folksonomy& train, ResourceId resource, std::size_t k) {
  return rank_counts(train.resource_tag_freq(resource), k);
}

RankedTags most_popular_user_resource(const Folksonomy& train, UserId user, ResourceId resource,
                                      double beta, std::size_t k) {
  const auto u = as_scores(train.user_tag_freq(user));
  const auto r = as_scores(train.resource_tag_freq(resource));
  return mix_components(u, r, beta, k);
}

RankedTags lda_recommend(const TopicModel& model, const Folksonomy& train, ResourceId resource,
                         std::size_t k) {
  const auto theta = resource_topics(model, train, resource);
  std::vector<double> score(model.num_tags(), 0.0);
  for (std::size_t z = 0; z < model.num_topics(); ++z) {
    const auto phi = model.phi(z);
    for (std::size_t t = 0; t < score.size(); ++t) score[t] += theta[z] * phi[t];
  }
  std::vector<ScoredTag> scores(score.size());
  for (std::size_t t = 0; t < score.size(); ++t) scores[t] = {make_id<TagId>(t), score[t]};
  return rank_top_k(std::move(scores), k);
}

RankedTags collaborative_filtering(const Folksonomy& train, UserId user, ResourceId resource,
                                   std::size_t k_neighbors, std::size_t k) {
  if (k_neighbors == 0) throw ConfigError("CF neighbourhood size must be at least 1");
  const auto profile = train.user_tag_freq(user);
  if (profile.empty()) return most_popular_resource(train, resource, k);

  struct Neighbor {
    UserId user;
    double sim;
  };
  std::vector<Neighbor> candidates;
  for (UserId v : train.active_users()) {
    if (v == user) continue;
    const double sim = cosine(profile, train.user_tag_freq(v));
    if (sim > 0.0) candidates.push_back({v, sim});
  }
  const std::size_t keep = std::min(k_neighbors, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), [](const Neighbor& a, const Neighbor& b) {
                      if (a.sim != b.sim) return a.sim > b.sim;
                      return idx(a.user) < idx(b.user);
                    });
  candidates.resize(keep);

  std::unordered_map<std::size_t, double> sim_of;
  for (const auto& n : candidates) sim_of[idx(n.user)] = n.sim;

  std::map<TagId, double> scores;
  for (std::size_t pi : train.resource_posts(resource)) {
    const Post& p = train.posts()[pi];
    auto it = sim_of.find(idx(p.user));
    if (it == sim_of.end()) continue;
    for (TagId t : p.tags) scores[t] += it->second;
  }
  if (scores.empty()) {
    for (const auto& n : candidates)
      for (const auto& tc : train.user_tag_freq(n.user)) scores[tc.tag] += n.sim * tc.count;
  }
  if (scores.empty()) return most_popular_resource(train, resource, k);
  return rank_top_k(from_map(scores), k);
}

// ---------------------------------------------------------------------------

FolkGraph::FolkGraph(std::size_t num_nodes, std::span<const WeightedEdge> edges)
    : adjacency_(num_nodes), degree_(num_nodes, 0.0), num_users_(0), num_resources_(0),
      num_tags_(0) {
  std::vector<std::map<std::size_t, double>> acc(num_nodes);
  for (const auto& e : edges) {
    if (e.a >= num_nodes || e.b >= num_nodes) throw Error("edge endpoint out of range");
    if (!(e.weight > 0.0)) throw Error("edge weights must be positive");
    acc[e.a][e.b] += e.weight;
    if (e.a != e.b) acc[e.b][e.a] += e.weight;
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    for (auto [j, w] : acc[i]) {
      adjacency_[i].push_back({j, w});
      degree_[i] += w;
    }
  }
}

FolkGraph FolkGraph::from_folksonomy(const Folksonomy& train) {
  const auto& v = train.vocab();
  const std::size_t nu = v.users.size(), nr = v.resources.size(), nt = v.tags.size();
  std::vector<WeightedEdge> edges;
  for (const Post& p : train.posts()) {
    const std::size_t u = idx(p.user), r = nu + idx(p.resource);
    for (TagId t : p.tags) {
      const std::size_t tn = nu + nr + idx(t);
      edges.push_back({u, tn, 1.0});
      edges.push_back({r, tn, 1.0});
      edges.push_back({u, r, 1.0});
    }
  }
  FolkGraph g(nu + nr + nt, edges);
  g.num_users_ = nu;
  g.num_resources_ = nr;
  g.num_tags_ = nt;
  return g;
}

double FolkGraph::weight(std::size_t a, std::size_t b) const {
  const auto& row = adjacency_.at(a);
  auto it = std::lower_bound(row.begin(), row.end(), b,
                             [](const Neighbor& n, std::size_t node) { return n.node < node; });
  return (it != row.end() && it->node == b) ? it->weight : 0.0;
}

PageRankResult pagerank_rank(const FolkGraph& graph, std::span<const double> preference,
                             const PageRankConfig& config) {
  const std::size_t n = graph.num_nodes();
  if (preference.size() != n) throw ConfigError("preference vector has wrong length");
  if (!(config.damping >= 0.0 && config.damping < 1.0))
    throw ConfigError("damping must lie in [0, 1)");
  PageRankResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  const double p_sum = std::accumulate(preference.begin(), preference.end(), 0.0);
  if (!(p_sum > 0.0)) throw ConfigError("preference must have positive mass");
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = preference[i] / p_sum;

  std::vector<double> w(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double deg = graph.degree(i);
      if (deg == 0.0) {
        dangling += w[i];
        continue;
      }
      const double share = w[i] / deg;
      for (const auto& nb : graph.neighbors(i)) next[nb.node] += share * nb.weight;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = config.damping * (next[i] + dangling * p[i]) + (1.0 - config.damping) * p[i];
      change += std::abs(next[i] - w[i]);
    }
    w.swap(next);
    result.iterations = it + 1;
    result.last_change = change;
    if (change < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.weights = std::move(w);
  return result;
}

namespace {

bool present(const FolkGraph& g, std::size_t node) {
  return node < g.num_nodes() && g.degree(node) > 0.0;
}

std::vector<double> tag_weights(const FolkGraph& g, const PageRankResult& r) {
  const std::size_t offset = g.num_users() + g.num_resources();
  return {r.weights.begin() + static_cast<std::ptrdiff_t>(offset), r.weights.end()};
}

}  // namespace

std::vector<double> query_preference(const FolkGraph& graph, std::optional<UserId> user,
                                     std::optional<ResourceId> resource) {
  const std::size_t n = graph.num_nodes();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  if (user && present(graph, graph.user_node(*user))) p[graph.user_node(*user)] += 0.5;
  if (resource && present(graph, graph.resource_node(*resource)))
    p[graph.resource_node(*resource)] += 0.5;
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return p;
}

RankedTags adapted_pagerank(const FolkGraph& graph, const Folksonomy& train, UserId user,
                            ResourceId resource, std::size_t k, const PageRankConfig& config) {
  if (!present(graph, graph.user_node(user)) && !present(graph, graph.resource_node(resource)))
    return most_popular(train, k);
  const auto run = pagerank_rank(graph, query_preference(graph, user, resource), config);
  const auto w = tag_weights(graph, run);
  std::vector<ScoredTag> scores;
  for (std::size_t t = 0; t < w.size(); ++t)
    if (present(graph, graph.tag_node(make_id<TagId>(t)))) scores.push_back({make_id<TagId>(t), w[t]});
  return rank_top_k(std::move(scores), k);
}

RankedTags folkrank(const FolkGraph& graph, const Folksonomy& train, UserId user,
                    ResourceId resource, std::size_t k, const PageRankConfig& config,
                    const PageRankResult* baseline) {
  if (!present(graph, graph.user_node(user)) && !present(graph, graph.resource_node(resource)))
    return most_popular(train, k);
  PageRankResult uniform_run;
  if (baseline == nullptr) {
    uniform_run = pagerank_rank(graph, query_preference(graph, std::nullopt, std::nullopt), config);
    baseline = &uniform_run;
  }
  const auto run = pagerank_rank(graph, query_preference(graph, user, resource), config);
  const auto w = tag_weights(graph, run);
  const auto w0 = tag_weights(graph, *baseline);
  std::vector<ScoredTag> scores;
  for (std::size_t t = 0; t < w.size(); ++t)
    if (present(graph, graph.tag_node(make_id<TagId>(t))))
      scores.push_back({make_id<TagId>(t), w[t] - w0[t]});
  return rank_top_k(std::move(scores), k);
}

// ---------------------------------------------------------------------------

std::vector<ScoredTag> bll_activations(const Folksonomy& train, UserId user, Timestamp ref_time,
                                       double decay) {
  std::map<TagId, double> sums;
  for (std::size_t pi : train.user_posts(user)) {
    const Post& p = train.posts()[pi];
    const double dt = std::max<double>(static_cast<double>(ref_time - p.timestamp), 1.0);
    for (TagId t : p.tags) sums[t] += std::pow(dt, -decay);
  }
  std::vector<ScoredTag> out;
  out.reserve(sums.size());
  for (auto [t, s] : sums) out.push_back({t, std::log(s)});
  return out;
}

RankedTags bll_c(const Folksonomy& train, UserId user, ResourceId resource, Timestamp ref_time,
                 double decay, double beta, std::size_t k) {
  const auto u = bll_activations(train, user, ref_time, decay);
  const auto r = as_scores(train.resource_tag_freq(resource));
  return mix_components(u, r, beta, k);
}

std::vector<ScoredTag> girptm_activations(const Folksonomy& train, UserId user,
                                          Timestamp ref_time) {
  const auto list = train.user_posts(user);
  std::vector<double> gaps;
  for (std::size_t i = 1; i < list.size(); ++i)
    gaps.push_back(static_cast<double>(train.posts()[list[i]].timestamp -
                                       train.posts()[list[i - 1]].timestamp));
  double lambda = static_cast<double>(kSecondsPerDay);
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    const double median = gaps.size() % 2 ? gaps[mid] : 0.5 * (gaps[mid - 1] + gaps[mid]);
    if (median > 0.0) lambda = median;
  }
  struct Usage {
    std::uint32_t freq = 0;
    Timestamp first = 0;
    Timestamp last = 0;
  };
  std::map<TagId, Usage> usage;
  for (std::size_t pi : list) {
    const Post& p = train.posts()[pi];
    for (TagId t : p.tags) {
      auto [it, inserted] = usage.try_emplace(t, Usage{0, p.timestamp, p.timestamp});
      it->second.freq += 1;
      it->second.first = std::min(it->second.first, p.timestamp);
      it->second.last = std::max(it->second.last, p.timestamp);
    }
  }
  std::vector<ScoredTag> out;
  for (const auto& [t, u] : usage) {
    const double recency = std::exp(-static_cast<double>(ref_time - u.last) / lambda);
    const double span = std::exp(-static_cast<double>(u.last - u.first) / lambda);
    out.push_back({t, u.freq * recency / (1.0 + span)});
  }
  return out;
}

RankedTags girptm(const Folksonomy& train, UserId user, ResourceId resource, Timestamp ref_time,
                  double beta, std::size_t k) {
  const auto u = girptm_activations(train, user, ref_time);
  const auto r = as_scores(train.resource_tag_freq(resource));
  return mix_components(u, r, beta, k);
}

}  // namespace tagrec
