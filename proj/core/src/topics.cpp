#include "tagrec/topics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace tagrec {

namespace {

// 53-bit uniform in [0, 1); portable, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw(std::mt19937_64& rng, std::span<const double> cumulative) {
  const double u = uniform01(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

constexpr std::uint64_t kInferenceStream = 0x9e3779b97f4a7c15ULL;

}  // namespace

void LdaConfig::validate() const {
  if (num_topics < 2) throw ConfigError("number of topics must be at least 2");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (iterations == 0) throw ConfigError("iterations must be at least 1");
}

// ---------------------------------------------------------------------------

TopicModel::TopicModel(LdaConfig config, std::size_t num_tags, std::vector<double> phi,
                       std::vector<std::vector<double>> theta, std::string trained_on)
    : config_(config),
      num_tags_(num_tags),
      phi_(std::move(phi)),
      theta_(std::move(theta)),
      trained_on_(std::move(trained_on)) {
  if (phi_.size() != config_.num_topics * num_tags_)
    throw Error("phi has wrong shape for topic model");
}

std::span<const double> TopicModel::phi(std::size_t topic) const {
  return std::span<const double>(phi_).subspan(topic * num_tags_, num_tags_);
}

std::optional<std::span<const double>> TopicModel::theta(ResourceId r) const {
  if (idx(r) >= theta_.size() || theta_[idx(r)].empty()) return std::nullopt;
  return std::span<const double>(theta_[idx(r)]);
}

std::vector<double> TopicModel::infer(std::span<const TagId> tags) const {
  const std::size_t z_count = num_topics();
  std::vector<TagId> words;
  for (TagId t : tags)
    if (idx(t) < num_tags_) words.push_back(t);
  if (words.empty()) return std::vector<double>(z_count, 1.0 / static_cast<double>(z_count));
  std::sort(words.begin(), words.end());

  const double alpha = config_.effective_alpha();
  std::mt19937_64 rng(config_.seed ^ kInferenceStream);
  std::vector<std::uint32_t> counts(z_count, 0);
  std::vector<std::uint32_t> z(words.size());
  std::vector<double> cumulative(z_count);
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = static_cast<std::uint32_t>(std::min<std::size_t>(
        static_cast<std::size_t>(uniform01(rng) * static_cast<double>(z_count)), z_count - 1));
    ++counts[z[i]];
  }
  const std::size_t sweeps = std::max<std::size_t>(config_.inference_sweeps, 1);
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --counts[z[i]];
      double acc = 0.0;
      for (std::size_t k = 0; k < z_count; ++k) {
        acc += (counts[k] + alpha) * phi_[k * num_tags_ + idx(words[i])];
        cumulative[k] = acc;
      }
      z[i] = static_cast<std::uint32_t>(draw(rng, cumulative));
      ++counts[z[i]];
    }
  }
  std::vector<double> out(z_count);
  const double denom = static_cast<double>(words.size()) + static_cast<double>(z_count) * alpha;
  for (std::size_t k = 0; k < z_count; ++k) out[k] = (counts[k] + alpha) / denom;
  return out;
}

// ---------------------------------------------------------------------------

GibbsSampler::GibbsSampler(const Folksonomy& corpus, const LdaConfig& config)
    : config_(config),
      alpha_(config.effective_alpha()),
      num_tags_(corpus.vocab().tags.size()),
      rng_(config.seed) {
  config_.validate();
  const std::size_t z_count = config_.num_topics;
  for (std::size_t r = 0; r < corpus.vocab().resources.size(); ++r) {
    const auto rid = make_id<ResourceId>(r);
    const std::size_t begin = words_.size();
    for (std::size_t pi : corpus.resource_posts(rid))
      for (TagId t : corpus.posts()[pi].tags) words_.push_back(t);
    // A document is a bag of words; sorting makes the token order, and so the
    // RNG consumption, independent of post order.
    std::sort(words_.begin() + static_cast<std::ptrdiff_t>(begin), words_.end());
    if (words_.size() > begin) docs_.push_back({rid, begin, words_.size()});
  }
  if (docs_.empty()) throw EmptyDatasetError("no tagged resources to train LDA on");

  assignments_.resize(words_.size());
  doc_topic_.assign(docs_.size() * z_count, 0);
  topic_word_.assign(z_count * num_tags_, 0);
  topic_total_.assign(z_count, 0);
  weights_.resize(z_count);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = docs_[d].begin; i < docs_[d].end; ++i) {
      const auto k = std::min<std::size_t>(
          static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(z_count)), z_count - 1);
      assignments_[i] = static_cast<std::uint32_t>(k);
      ++doc_topic_[d * z_count + k];
      ++topic_word_[k * num_tags_ + idx(words_[i])];
      ++topic_total_[k];
    }
  }
}

void GibbsSampler::sweep() {
  const std::size_t z_count = config_.num_topics;
  const double eta = config_.eta;
  const double eta_sum = eta * static_cast<double>(num_tags_);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    std::uint32_t* dt = &doc_topic_[d * z_count];
    for (std::size_t i = docs_[d].begin; i < docs_[d].end; ++i) {
      const std::size_t w = idx(words_[i]);
      std::size_t k = assignments_[i];
      --dt[k];
      --topic_word_[k * num_tags_ + w];
      --topic_total_[k];
      double acc = 0.0;
      for (std::size_t j = 0; j < z_count; ++j) {
        acc += (dt[j] + alpha_) * (topic_word_[j * num_tags_ + w] + eta) /
               (topic_total_[j] + eta_sum);
        weights_[j] = acc;
      }
      k = draw(rng_, weights_);
      assignments_[i] = static_cast<std::uint32_t>(k);
      ++dt[k];
      ++topic_word_[k * num_tags_ + w];
      ++topic_total_[k];
    }
  }
  ++sweeps_;
}

double GibbsSampler::log_likelihood() const {
  const double eta = config_.eta;
  const double eta_sum = eta * static_cast<double>(num_tags_);
  const double lg_eta = std::lgamma(eta);
  double ll = 0.0;
  for (std::size_t k = 0; k < config_.num_topics; ++k) {
    ll += std::lgamma(eta_sum) - std::lgamma(topic_total_[k] + eta_sum);
    for (std::size_t w = 0; w < num_tags_; ++w) {
      const auto n = topic_word_[k * num_tags_ + w];
      if (n > 0) ll += std::lgamma(n + eta) - lg_eta;
    }
  }
  return ll;
}

TopicModel GibbsSampler::model(std::string trained_on) const {
  const std::size_t z_count = config_.num_topics;
  const double eta = config_.eta;
  std::vector<double> phi(z_count * num_tags_);
  for (std::size_t k = 0; k < z_count; ++k) {
    const double denom = topic_total_[k] + eta * static_cast<double>(num_tags_);
    for (std::size_t w = 0; w < num_tags_; ++w)
      phi[k * num_tags_ + w] = (topic_word_[k * num_tags_ + w] + eta) / denom;
  }
  std::size_t max_resource = 0;
  for (const auto& d : docs_) max_resource = std::max(max_resource, idx(d.resource) + 1);
  std::vector<std::vector<double>> theta(max_resource);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    auto& row = theta[idx(docs_[d].resource)];
    row.resize(z_count);
    const double denom = static_cast<double>(docs_[d].end - docs_[d].begin) +
                         static_cast<double>(z_count) * alpha_;
    for (std::size_t k = 0; k < z_count; ++k)
      row[k] = (doc_topic_[d * z_count + k] + alpha_) / denom;
  }
  return TopicModel(config_, num_tags_, std::move(phi), std::move(theta), std::move(trained_on));
}

TopicModel train_lda(const Folksonomy& corpus, const LdaConfig& config) {
  GibbsSampler sampler(corpus, config);
  for (std::size_t i = 0; i < config.iterations; ++i) sampler.sweep();
  return sampler.model(corpus.fingerprint());
}

std::vector<double> resource_topics(const TopicModel& model, const Folksonomy& train,
                                    ResourceId r) {
  if (auto theta = model.theta(r)) return {theta->begin(), theta->end()};
  std::vector<TagId> tags;
  for (std::size_t pi : train.resource_posts(r))
    for (TagId t : train.posts()[pi].tags) tags.push_back(t);
  return model.infer(tags);
}

double held_out_log_likelihood(const TopicModel& model,
                               std::span<const std::vector<TagId>> documents) {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& doc : documents) {
    const auto theta = model.infer(doc);
    for (TagId t : doc) {
      if (idx(t) >= model.num_tags()) continue;
      double p = 0.0;
      for (std::size_t k = 0; k < model.num_topics(); ++k) p += theta[k] * model.phi(k)[idx(t)];
      total += std::log(p);
      ++tokens;
    }
  }
  return tokens == 0 ? 0.0 : total / static_cast<double>(tokens);
}

// ---------------------------------------------------------------------------
// Snapshot format (tab separated, one record per line):
//   # key: value            free-form header lines
//   format  tagrec-lda  1
//   config  Z  alpha  eta  iterations  seed  inference_sweeps
//   trained_on  <fingerprint>
//   tag  <name>             one per column of phi, in column order
//   phi  <topic>  v_1 ... v_T
//   theta  <resource>  v_1 ... v_Z

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, '\t')) f.push_back(item);
  return f;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line, "invalid number '" + s + "'");
  return v;
}

}  // namespace

void save_model(std::ostream& out, const TopicModel& model, const Vocabularies& vocab,
                const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  const auto& c = model.config();
  out << "format\ttagrec-lda\t1\n";
  out << "config\t" << c.num_topics << '\t';
  put(out, c.effective_alpha());
  out << '\t';
  put(out, c.eta);
  out << '\t' << c.iterations << '\t' << c.seed << '\t' << c.inference_sweeps << '\n';
  out << "trained_on\t" << model.trained_on() << '\n';
  for (std::size_t t = 0; t < model.num_tags(); ++t)
    out << "tag\t" << vocab.tag_name(make_id<TagId>(t)) << '\n';
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    out << "phi\t" << k;
    for (double v : model.phi(k)) {
      out << '\t';
      put(out, v);
    }
    out << '\n';
  }
  for (std::size_t r = 0; r < model.num_documents(); ++r) {
    const auto theta = model.theta(make_id<ResourceId>(r));
    if (!theta) continue;
    out << "theta\t" << vocab.resource_name(make_id<ResourceId>(r));
    for (double v : *theta) {
      out << '\t';
      put(out, v);
    }
    out << '\n';
  }
}

TopicModel load_model(std::istream& in, const Vocabularies& vocab) {
  LdaConfig config;
  std::string trained_on;
  std::vector<std::size_t> columns;  // snapshot column -> vocab tag id
  std::vector<std::vector<double>> phi_rows;
  std::vector<std::vector<double>> theta(vocab.resources.size());
  bool have_format = false, have_config = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_fields(line);
    const std::string& kind = f[0];
    if (kind == "format") {
      if (f.size() != 3 || f[1] != "tagrec-lda" || f[2] != "1")
        throw ParseError(line_no, "unsupported model format");
      have_format = true;
    } else if (kind == "config") {
      if (f.size() != 7) throw ParseError(line_no, "config record needs 6 values");
      config.num_topics = parse_number<std::size_t>(f[1], line_no);
      config.alpha = parse_number<double>(f[2], line_no);
      config.eta = parse_number<double>(f[3], line_no);
      config.iterations = parse_number<std::size_t>(f[4], line_no);
      config.seed = parse_number<std::uint64_t>(f[5], line_no);
      config.inference_sweeps = parse_number<std::size_t>(f[6], line_no);
      have_config = true;
    } else if (kind == "trained_on") {
      if (f.size() != 2) throw ParseError(line_no, "malformed trained_on record");
      trained_on = f[1];
    } else if (kind == "tag") {
      if (f.size() != 2) throw ParseError(line_no, "malformed tag record");
      const auto id = vocab.tags.find(f[1]);
      if (!id) throw FingerprintError("model tag '" + f[1] + "' is not in the dataset");
      columns.push_back(*id);
    } else if (kind == "phi" || kind == "theta") {
      if (!have_config) throw ParseError(line_no, "record before config");
      std::vector<double> values;
      for (std::size_t i = 2; i < f.size(); ++i) values.push_back(parse_number<double>(f[i], line_no));
      if (kind == "phi") {
        if (values.size() != columns.size()) throw ParseError(line_no, "phi row length mismatch");
        phi_rows.push_back(std::move(values));
      } else {
        if (values.size() != config.num_topics)
          throw ParseError(line_no, "theta row length mismatch");
        const auto id = vocab.resources.find(f[1]);
        if (!id) throw FingerprintError("model resource '" + f[1] + "' is not in the dataset");
        theta[*id] = std::move(values);
      }
    } else {
      throw ParseError(line_no, "unknown record '" + kind + "'");
    }
  }
  if (!have_format || !have_config) throw ParseError(line_no, "missing format or config record");
  if (phi_rows.size() != config.num_topics) throw ParseError(line_no, "wrong number of phi rows");
  const std::size_t num_tags = vocab.tags.size();
  std::vector<double> phi(config.num_topics * num_tags, 0.0);
  for (std::size_t k = 0; k < config.num_topics; ++k)
    for (std::size_t c = 0; c < columns.size(); ++c) phi[k * num_tags + columns[c]] = phi_rows[k][c];
  return TopicModel(config, num_tags, std::move(phi), std::move(theta), std::move(trained_on));
}

}  // namespace tagrec
