#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tagrec/folksonomy.hpp"

namespace tagrec {

struct LdaConfig {
  std::size_t num_topics = 100;
  /// Symmetric document-topic prior; a non-positive value means 50 / Z.
  double alpha = 0.0;
  double eta = 0.01;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  /// Fold-in sweeps used when inferring topics for unseen tag sets.
  std::size_t inference_sweeps = 50;

  double effective_alpha() const noexcept {
    return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(num_topics);
  }
  /// Throws ConfigError on Z < 2, eta <= 0, iterations == 0.
  void validate() const;
};

/// Trained LDA state. Documents are resources; words are the tags assigned
/// to them. Immutable once built.
class TopicModel {
 public:
  TopicModel() = default;
  TopicModel(LdaConfig config, std::size_t num_tags, std::vector<double> phi,
             std::vector<std::vector<double>> theta, std::string trained_on);

  const LdaConfig& config() const noexcept { return config_; }
  std::size_t num_topics() const noexcept { return config_.num_topics; }
  std::size_t num_tags() const noexcept { return num_tags_; }
  const std::string& trained_on() const noexcept { return trained_on_; }

  /// P(tag | topic) over the tag vocabulary.
  std::span<const double> phi(std::size_t topic) const;
  /// P(topic | resource); nullopt for resources outside the training corpus.
  std::optional<std::span<const double>> theta(ResourceId r) const;
  std::size_t num_documents() const noexcept { return theta_.size(); }

  /// Fold-in Gibbs sampling with phi frozen. Out-of-vocabulary tags are
  /// skipped; an empty or all-OOV input yields the uniform vector.
  std::vector<double> infer(std::span<const TagId> tags) const;

 private:
  LdaConfig config_;
  std::size_t num_tags_ = 0;
  std::vector<double> phi_;                 // Z x T, row-major
  std::vector<std::vector<double>> theta_;  // by resource id, empty if untrained
  std::string trained_on_;
};

/// Collapsed Gibbs sampler over the resource documents of a folksonomy.
/// Document order is ascending resource id and tokens within a document are
/// sorted by tag id, so the model does not depend on post order. One RNG
/// stream seeded by config.seed drives initialization and all sweeps.
class GibbsSampler {
 public:
  GibbsSampler(const Folksonomy& corpus, const LdaConfig& config);

  void sweep();
  std::size_t sweeps_done() const noexcept { return sweeps_; }
  std::size_t num_documents() const noexcept { return docs_.size(); }
  std::size_t num_tokens() const noexcept { return assignments_.size(); }

  /// Joint log p(words | assignments) with phi integrated out.
  double log_likelihood() const;

  TopicModel model(std::string trained_on) const;

 private:
  struct Document {
    ResourceId resource;
    std::size_t begin;  // into words_/assignments_
    std::size_t end;
  };

  LdaConfig config_;
  double alpha_;
  std::size_t num_tags_;
  std::vector<Document> docs_;
  std::vector<TagId> words_;
  std::vector<std::uint32_t> assignments_;
  std::vector<std::uint32_t> doc_topic_;    // docs x Z
  std::vector<std::uint32_t> topic_word_;   // Z x T
  std::vector<std::uint32_t> topic_total_;  // Z
  std::vector<double> weights_;
  std::mt19937_64 rng_;
  std::size_t sweeps_ = 0;
};

/// Trains on every resource that carries at least one tag in `corpus`.
TopicModel train_lda(const Folksonomy& corpus, const LdaConfig& config);

/// Topic vector describing a resource: its theta if the model was trained on
/// it, otherwise inferred from the resource's tags in `train`, otherwise
/// uniform.
std::vector<double> resource_topics(const TopicModel& model, const Folksonomy& train,
                                    ResourceId r);

/// Mean per-token log P(tag | doc) = log sum_z theta[z] * phi[z][tag] over the
/// given documents, with theta inferred by fold-in.
double held_out_log_likelihood(const TopicModel& model,
                               std::span<const std::vector<TagId>> documents);

/// Versioned TSV snapshot. Resources and tags are written by name so the
/// snapshot can be re-attached to any vocabulary containing them.
void save_model(std::ostream& out, const TopicModel& model, const Vocabularies& vocab,
                const std::vector<std::string>& header = {});
/// Throws ParseError on malformed input and FingerprintError if a name in the
/// snapshot is missing from `vocab`.
TopicModel load_model(std::istream& in, const Vocabularies& vocab);

}  // namespace tagrec
