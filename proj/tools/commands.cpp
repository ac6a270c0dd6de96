#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tagrec/fingerprint.hpp"
#include "tagrec/folksonomy.hpp"
#include "tagrec/recommenders.hpp"
#include "tagrec/synthetic.hpp"
#include "tagrec/topics.hpp"

namespace tagrec::cli {

namespace fs = std::filesystem;

namespace {

// Our own snapshots are already normalized, so nothing is filtered on reload.
const IngestOptions kVerbatim{{}};

std::ofstream open_output(const fs::path& p) {
  if (p.empty()) throw ConfigError("--out is required");
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::string read_file(const fs::path& p) {
  require_input(p);
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string strip_header(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line))
    if (line.empty() || line.front() != '#') out += line + '\n';
  return out;
}

std::set<std::string, std::less<>> read_blacklist(const std::string& path) {
  if (path.empty()) return default_blacklist();
  require_input(path);
  std::ifstream in(path);
  std::set<std::string, std::less<>> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.front() == '#') continue;
    if (auto t = normalize_tag(line, {})) out.insert(*t);
  }
  return out;
}

std::string posts_fingerprint(const Vocabularies& vocab, std::span<const Post> posts) {
  std::ostringstream os;
  write_posts(os, vocab, posts);
  return fingerprint_of(os.str());
}

std::string split_fingerprint(const DatasetSplit& s) {
  return Fingerprint().add(s.train.fingerprint()).add(posts_fingerprint(s.train.vocab(), s.test)).hex();
}

void expect_equal(const std::string& want, const std::string& got, const std::string& what) {
  if (want != got) throw FingerprintError(what + " (expected " + want + ", found " + got + ")");
}

struct LoadedDataset {
  Folksonomy data;
  std::string fingerprint;
};

LoadedDataset load_dataset(const fs::path& p) {
  const auto h = input_header(p);
  const auto declared = header_value(h, "dataset_fingerprint", p);
  auto f = ingest(p, kVerbatim);
  const auto actual = f.fingerprint();
  expect_equal(declared, actual, p.string() + " does not match its recorded fingerprint");
  return {std::move(f), actual};
}

struct LoadedSplit {
  DatasetSplit split;
  std::string fingerprint;
  std::string dataset_fingerprint;
};

LoadedSplit load_split_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("--split is required");
  const auto train_path = dir / "train.tsv", test_path = dir / "test.tsv";
  const auto train_h = input_header(train_path), test_h = input_header(test_path);
  const auto fp = header_value(train_h, "split_fingerprint", train_path);
  expect_equal(fp, header_value(test_h, "split_fingerprint", test_path),
               "train and test files come from different splits");
  LoadedSplit out{load_split(train_path, test_path, kVerbatim), fp,
                  header_value(train_h, "dataset_fingerprint", train_path)};
  expect_equal(fp, split_fingerprint(out.split), "split files do not match their recorded fingerprint");
  return out;
}

struct LoadedModel {
  TopicModel model;
  std::string fingerprint;
  Header header;
};

/// Loads a model snapshot and checks that its recorded input matches.
LoadedModel load_model_file(const fs::path& p, const Vocabularies& vocab, const std::string& key,
                            const std::string& expected) {
  const auto text = read_file(p);
  const auto h = input_header(p);
  expect_equal(header_value(h, key, p), expected, p.string() + " was trained on different data");
  const auto body = strip_header(text);
  const auto fp = header_value(h, "model_fingerprint", p);
  expect_equal(fp, fingerprint_of(body), p.string() + " does not match its recorded fingerprint");
  std::istringstream in(body);
  return {load_model(in, vocab), fp, h};
}

std::vector<Algorithm> selected_algorithms(const RunConfig& c) {
  if (c.algos.empty()) return {all_algorithms().begin(), all_algorithms().end()};
  std::vector<Algorithm> out;
  for (const auto& a : c.algos) out.push_back(*parse_algorithm(a));
  return out;
}

RecommenderParams params_from(const RunConfig& c) {
  RecommenderParams p;
  p.beta = c.beta;
  p.decay = c.d;
  p.recency = *parse_recency(c.recency);
  p.k = c.k;
  return p;
}

/// Shared set-up of recommend and eval: split, optional model, filtered test
/// posts and the recommender suite.
struct Session {
  LoadedSplit split;
  std::optional<LoadedModel> model;
  std::vector<Algorithm> algos;
  std::vector<Post> test;
  std::unique_ptr<RecommenderSuite> suite;

  explicit Session(const CommandOptions& o) : split(load_split_dir(o.split_dir)) {
    algos = selected_algorithms(o.config);
    bool needs_model = false;
    for (auto a : algos) needs_model |= needs_topic_model(a);
    if (needs_model && o.model.empty())
      throw ConfigError("a topic model (--model) is required for the selected algorithms");
    if (!o.model.empty())
      model = load_model_file(o.model, split.split.train.vocab(), "split_fingerprint", split.fingerprint);
    test = filter_test_users(split.split, o.config.b_min);
    if (test.empty())
      throw EmptyDatasetError("no test user has at least " + std::to_string(o.config.b_min) + " posts");
    suite = std::make_unique<RecommenderSuite>(split.split.train, model ? &model->model : nullptr,
                                               params_from(o.config), algos);
  }

  /// The run as executed: the split stands in for the dataset and the topic
  /// parameters are those the model was trained with.
  RunConfig resolved(const CommandOptions& o) const {
    auto c = o.config;
    c.dataset = o.split_dir;
    if (model) {
      const auto& lc = model->model.config();
      c.topics = lc.num_topics;
      c.alpha = lc.effective_alpha();
      c.eta = lc.eta;
      c.iterations = lc.iterations;
      c.seed = lc.seed;
      c.paper_mode = header_value(model->header, "lda_training", o.model) == "all-posts";
    }
    return c;
  }

  std::vector<std::string> header(const RunConfig& c) const {
    auto h = c.header();
    h.push_back("dataset_fingerprint: " + split.dataset_fingerprint);
    h.push_back("split_fingerprint: " + split.fingerprint);
    h.push_back("model_fingerprint: " + (model ? model->fingerprint : std::string("none")));
    return h;
  }
};

}  // namespace

void cmd_ingest(const CommandOptions& o) {
  auto c = o.config;
  c.dataset = o.input;
  c.validate();
  if (!(o.sample_users > 0.0 && o.sample_users <= 1.0))
    throw ConfigError("--sample-users must lie in (0, 1]");
  require_input(o.input);
  IngestOptions opts;
  opts.blacklist = read_blacklist(c.blacklist);
  auto f = ingest(fs::path(o.input), opts);
  if (o.sample_users < 1.0) f = sample_users(f, o.sample_users, c.seed);
  auto h = c.header();
  if (o.sample_users < 1.0) h.push_back("sample_users: " + format_double(o.sample_users));
  h.push_back("dataset_fingerprint: " + f.fingerprint());
  const auto s = f.stats();
  h.push_back("stats: posts=" + std::to_string(s.bookmarks) + " users=" + std::to_string(s.users) +
              " resources=" + std::to_string(s.resources) + " tags=" + std::to_string(s.tags) +
              " assignments=" + std::to_string(s.assignments));
  auto out = open_output(c.out);
  write_snapshot(out, f, h);
}

void cmd_split(const CommandOptions& o) {
  auto c = o.config;
  c.dataset = o.input;
  c.validate();
  if (c.out.empty()) throw ConfigError("--out is required");
  const auto ds = load_dataset(o.input);
  auto split = leave_one_out_split(ds.data);
  const auto fp = split_fingerprint(split);
  for (const char* part : {"train", "test"}) {
    auto h = c.header();
    h.push_back(std::string("part: ") + part);
    h.push_back("dataset_fingerprint: " + ds.fingerprint);
    h.push_back("split_fingerprint: " + fp);
    auto out = open_output(fs::path(c.out) / (std::string(part) + ".tsv"));
    if (std::string_view(part) == "train")
      write_snapshot(out, split.train, h);
    else
      write_posts(out, split.train.vocab(), split.test, h);
  }
}

void cmd_lda(const CommandOptions& o) {
  auto c = o.config;
  c.validate();
  if (o.split_dir.empty() == o.input.empty())
    throw ConfigError("lda needs exactly one of --split or --dataset");
  LdaConfig lc;
  lc.num_topics = c.topics;
  lc.alpha = c.alpha;
  lc.eta = c.eta;
  lc.iterations = c.iterations;
  lc.seed = c.seed;

  std::vector<std::string> h;
  std::optional<TopicModel> model;
  std::shared_ptr<const Vocabularies> vocab;
  if (!o.split_dir.empty()) {
    c.dataset = o.split_dir;
    const auto s = load_split_dir(o.split_dir);
    vocab = s.split.train.vocab_ptr();
    if (c.paper_mode) {
      // Train on every post, including the held-out ones.
      std::vector<Post> all(s.split.train.posts().begin(), s.split.train.posts().end());
      all.insert(all.end(), s.split.test.begin(), s.split.test.end());
      model = train_lda(Folksonomy(vocab, std::move(all)), lc);
    } else {
      model = train_lda(s.split.train, lc);
    }
    h = c.header();
    h.push_back("lda_training: " + std::string(c.paper_mode ? "all-posts" : "train-only"));
    h.push_back("dataset_fingerprint: " + s.dataset_fingerprint);
    h.push_back("split_fingerprint: " + s.fingerprint);
  } else {
    c.dataset = o.input;
    const auto ds = load_dataset(o.input);
    vocab = ds.data.vocab_ptr();
    model = train_lda(ds.data, lc);
    h = c.header();
    h.push_back("lda_training: full-dataset");
    h.push_back("dataset_fingerprint: " + ds.fingerprint);
    h.push_back("split_fingerprint: none");
  }
  std::ostringstream body;
  save_model(body, *model, *vocab);
  h.push_back("model_fingerprint: " + fingerprint_of(body.str()));
  auto out = open_output(c.out);
  for (const auto& line : h) out << "# " << line << '\n';
  out << body.str();
}

void cmd_recommend(const CommandOptions& o) {
  o.config.validate();
  const Session s(o);
  const auto c = s.resolved(o);
  auto out = open_output(c.out);
  for (const auto& line : s.header(c)) out << "# " << line << '\n';
  out << "algorithm\tuser\tresource\trank\ttag\tscore\n";
  const auto& vocab = s.split.split.train.vocab();
  for (auto a : s.algos) {
    for (const auto& p : s.test) {
      auto ranked = s.suite->recommend(a, p);
      if (ranked.size() > c.k) ranked.resize(c.k);
      for (std::size_t i = 0; i < ranked.size(); ++i)
        out << algorithm_name(a) << '\t' << vocab.user_name(p.user) << '\t' << vocab.resource_name(p.resource)
            << '\t' << i + 1 << '\t' << vocab.tag_name(ranked[i].tag) << '\t' << format_double(ranked[i].score)
            << '\n';
    }
  }
}

void cmd_eval(const CommandOptions& o) {
  o.config.validate();
  if (o.config.out.empty()) throw ConfigError("--out is required");
  const auto workers = workers_from_env();
  const Session s(o);
  const auto c = s.resolved(o);
  EvalOptions opts;
  opts.precision_mode = o.strict_precision ? PrecisionMode::strict : PrecisionMode::returned;
  opts.significance = o.significance;
  opts.workers = workers;
  auto report = evaluate(s.suite->named(s.algos), s.test, opts);

  auto& m = report.metadata;
  m["tool"] = "tagrec";
  m["command"] = c.command;
  m["config"] = c.serialize();
  m["run_fingerprint"] = c.fingerprint();
  m["dataset_fingerprint"] = s.split.dataset_fingerprint;
  m["split_fingerprint"] = s.split.fingerprint;
  m["model_fingerprint"] = s.model ? s.model->fingerprint : "none";
  if (s.model) m["lda_training"] = header_value(s.model->header, "lda_training", o.model);
  m["test_cases"] = std::to_string(s.test.size());
  m["precision"] = o.strict_precision ? "divide by k" : "divide by min(k, returned tags)";
  m["mrr"] = "per case: sum of 1/rank over true tags in the top 10, divided by the number of true tags";
  for (auto a : s.algos)
    if (a == Algorithm::girptm) m["girptm"] = kGirptmNote;

  const fs::path dir(c.out);
  {
    auto out = open_output(dir / "report.json");
    write_report_json(out, report);
  }
  {
    auto out = open_output(dir / "report.tsv");
    write_report_tsv(out, report);
  }
  if (o.curves) {
    auto out = open_output(dir / "curves.tsv");
    write_curves_tsv(out, report);
  }
}

void cmd_drift(const CommandOptions& o) {
  auto c = o.config;
  c.dataset = o.input;
  c.validate();
  if (o.model.empty()) throw ConfigError("--model is required");
  if (o.max_lag == 0) throw ConfigError("--max-lag must be positive");
  const auto ds = load_dataset(o.input);
  const auto m = load_model_file(o.model, ds.data.vocab(), "dataset_fingerprint", ds.fingerprint);
  const auto rows = drift_analysis(ds.data, m.model, o.max_lag);
  auto h = c.header();
  h.push_back("max_lag: " + std::to_string(o.max_lag));
  h.push_back("dataset_fingerprint: " + ds.fingerprint);
  h.push_back("model_fingerprint: " + m.fingerprint);
  auto out = open_output(c.out);
  write_drift_tsv(out, rows, h);
}

void cmd_gen_fixture(const CommandOptions& o) {
  auto c = o.config;
  c.validate();
  DriftCorpusConfig dc;
  dc.users = o.fixture_users;
  dc.posts_per_user = o.fixture_posts;
  dc.topics = 3;
  dc.tags_per_topic = 12;
  dc.resources_per_topic = 30;
  dc.seed = c.seed;
  if (dc.users == 0 || dc.posts_per_user == 0) throw ConfigError("--users and --posts must be positive");
  const auto raw = generate_drift_corpus(dc);
  Vocabularies vocab;
  const auto posts = intern_posts(raw, vocab);
  auto h = c.header();
  h.push_back("fixture: " + std::to_string(dc.users) + " users x " + std::to_string(dc.posts_per_user) +
              " posts, 3 planted topics with rotating tag windows");
  auto out = open_output(c.out);
  write_posts(out, vocab, posts, h);
}

}  // namespace tagrec::cli
