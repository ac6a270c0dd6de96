#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tagrec/folksonomy.hpp"
#include "tagrec/ranking.hpp"
#include "tagrec/topics.hpp"

namespace tagrec {

// ---------------------------------------------------------------------------
// Most popular family

RankedTags most_popular(const Folksonomy& train, std::size_t k);
RankedTags most_popular_user(const Folksonomy& train, UserId user, std::size_t k);
RankedTags most_popular_resource(const Folksonomy& train, ResourceId resource, std::size_t k);

/// beta * softmax(freq_u) + (1 - beta) * softmax(freq_r).
RankedTags most_popular_user_resource(const Folksonomy& train, UserId user, ResourceId resource,
                                      double beta, std::size_t k);

// ---------------------------------------------------------------------------

/// score(t) = sum_z theta[resource][z] * phi[z][t] over the full tag vocabulary.
RankedTags lda_recommend(const TopicModel& model, const Folksonomy& train, ResourceId resource,
                         std::size_t k);

/// User-based k-nearest-neighbour CF over user-tag frequency profiles.
///
/// Neighbours are the k_neighbors users with the highest positive cosine
/// similarity (ties by user id). Candidates are scored by
/// sum_v sim(u, v) * [v assigned t to resource]; if that is empty, by
/// sum_v sim(u, v) * freq_v(t); if that is empty too, or the user has no
/// profile, the result is MP_r.
RankedTags collaborative_filtering(const Folksonomy& train, UserId user, ResourceId resource,
                                   std::size_t k_neighbors, std::size_t k);

// ---------------------------------------------------------------------------
// Graph ranking

struct WeightedEdge {
  std::size_t a;
  std::size_t b;
  double weight;
};

/// Undirected weighted graph in adjacency-list form. from_folksonomy lays out
/// nodes as [users | resources | tags] and adds weight 1 to the user-tag,
/// resource-tag and user-resource edge of every tag assignment.
class FolkGraph {
 public:
  struct Neighbor {
    std::size_t node;
    double weight;
  };

  FolkGraph() = default;
  /// Parallel edges accumulate. Throws Error on out-of-range nodes or
  /// non-positive weights.
  FolkGraph(std::size_t num_nodes, std::span<const WeightedEdge> edges);

  static FolkGraph from_folksonomy(const Folksonomy& train);

  std::size_t num_nodes() const noexcept { return adjacency_.size(); }
  std::span<const Neighbor> neighbors(std::size_t node) const { return adjacency_[node]; }
  double degree(std::size_t node) const { return degree_[node]; }
  /// Weight of edge (a, b), 0 if absent.
  double weight(std::size_t a, std::size_t b) const;

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_resources() const noexcept { return num_resources_; }
  std::size_t num_tags() const noexcept { return num_tags_; }
  std::size_t user_node(UserId u) const noexcept { return idx(u); }
  std::size_t resource_node(ResourceId r) const noexcept { return num_users_ + idx(r); }
  std::size_t tag_node(TagId t) const noexcept { return num_users_ + num_resources_ + idx(t); }

 private:
  std::vector<std::vector<Neighbor>> adjacency_;  // sorted by neighbour id
  std::vector<double> degree_;
  std::size_t num_users_ = 0;
  std::size_t num_resources_ = 0;
  std::size_t num_tags_ = 0;
};

struct PageRankConfig {
  double damping = 0.7;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
};

struct PageRankResult {
  std::vector<double> weights;
  std::size_t iterations = 0;
  double last_change = 0.0;  // L1 norm of the final update
  bool converged = false;
};

/// Iterates w <- damping * A w + (1 - damping) * p from the uniform vector,
/// where A is the weight matrix normalized by source degree and p is the
/// preference normalized to sum 1. Mass sitting on isolated nodes is
/// redistributed along p, so the weights stay a probability vector. Stops
/// when the L1 change drops below the tolerance.
PageRankResult pagerank_rank(const FolkGraph& graph, std::span<const double> preference,
                             const PageRankConfig& config = {});

/// Uniform 1/|V| preference plus 0.5 on each present query node, normalized.
std::vector<double> query_preference(const FolkGraph& graph, std::optional<UserId> user,
                                     std::optional<ResourceId> resource);

/// Adapted PageRank: tags ranked by their personalized weight.
RankedTags adapted_pagerank(const FolkGraph& graph, const Folksonomy& train, UserId user,
                            ResourceId resource, std::size_t k, const PageRankConfig& config = {});

/// FolkRank: personalized minus uniform-preference weight on tag nodes.
/// `baseline` may carry a precomputed uniform-preference run.
RankedTags folkrank(const FolkGraph& graph, const Folksonomy& train, UserId user,
                    ResourceId resource, std::size_t k, const PageRankConfig& config = {},
                    const PageRankResult* baseline = nullptr);

// ---------------------------------------------------------------------------
// Time-aware baselines

/// BLL+C: raw(t) = ln(sum over the user's usages of t of max(dt, 1)^-d),
/// mixed with the resource's tag frequencies.
RankedTags bll_c(const Folksonomy& train, UserId user, ResourceId resource, Timestamp ref_time,
                 double decay, double beta, std::size_t k);

/// Raw BLL activations of the user's tags (the user component of bll_c).
std::vector<ScoredTag> bll_activations(const Folksonomy& train, UserId user, Timestamp ref_time,
                                       double decay);

/// GIRPTM stand-in (not the canonical formulation):
///   raw(t) = freq_u(t) * exp(-(ref - t_last) / lambda)
///            / (1 + exp(-(t_last - t_first) / lambda))
/// with lambda the median gap between the user's consecutive posts (one day
/// if undefined or zero), mixed with the resource's tag frequencies.
RankedTags girptm(const Folksonomy& train, UserId user, ResourceId resource, Timestamp ref_time,
                  double beta, std::size_t k);

std::vector<ScoredTag> girptm_activations(const Folksonomy& train, UserId user,
                                          Timestamp ref_time);

/// Label carried into report metadata wherever girptm results appear.
inline constexpr const char* kGirptmNote =
    "girptm uses a documented stand-in reuse formula, not the canonical GIRPTM equations";

}  // namespace tagrec
