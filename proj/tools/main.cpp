#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace tagrec;
using namespace tagrec::cli;

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n' || c == '\r') {
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

int fail(const char* code, int exit_code, std::string_view message) {
  std::fprintf(stderr, "error: code=%s exit=%d message=\"%s\"\n", code, exit_code, escape(message).c_str());
  return exit_code;
}

void add_lda_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--topics", c.topics, "Number of LDA topics Z");
  cmd->add_option("--alpha", c.alpha, "Document-topic prior; 0 selects 50/Z");
  cmd->add_option("--eta", c.eta, "Topic-tag prior");
  cmd->add_option("--iterations", c.iterations, "Gibbs sweeps");
}

void add_rec_options(CLI::App* cmd, RunConfig& c, CommandOptions& o) {
  cmd->add_option("--split", o.split_dir, "Directory with train.tsv and test.tsv")->required();
  cmd->add_option("--model", o.model, "Topic model snapshot (needed by lda and 3L variants)");
  cmd->add_option("--algos", c.algos, "Comma-separated algorithms (default: all)")->delimiter(',');
  cmd->add_option("--beta", c.beta, "Weight of the user component");
  cmd->add_option("--d", c.d, "Base-level decay exponent");
  cmd->add_option("--k", c.k, "Tags per recommendation");
  cmd->add_option("--b-min", c.b_min, "Evaluate only users with at least this many posts");
  cmd->add_option("--recency", c.recency, "Recency factor for time-aware 3L: power or log");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tag recommendation experiments: ingest, split, topic models, recommend, evaluate."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tagrec 0.1.0");

  CommandOptions o;
  RunConfig& c = o.config;
  std::function<void(const CommandOptions&)> run;

  auto* ingest = app.add_subcommand("ingest", "Normalize a TAS file into a dataset snapshot");
  ingest->add_option("--input", o.input, "TAS file: user, resource, tag, timestamp")->required();
  ingest->add_option("--blacklist", c.blacklist, "File with tags to drop, one per line");
  ingest->add_option("--sample-users", o.sample_users, "Keep this fraction of users");
  ingest->add_option("--seed", c.seed, "Seed for user sampling");
  ingest->add_option("--out", c.out, "Dataset snapshot to write")->required();
  ingest->callback([&] { run = cmd_ingest; });

  auto* split = app.add_subcommand("split", "Leave-one-out split by time");
  split->add_option("--dataset", o.input, "Dataset snapshot")->required();
  split->add_option("--out", c.out, "Output directory for train.tsv and test.tsv")->required();
  split->callback([&] { run = cmd_split; });

  auto* lda = app.add_subcommand("lda", "Train a topic model");
  lda->add_option("--split", o.split_dir, "Train on a split (training side unless --paper-mode)");
  lda->add_option("--dataset", o.input, "Train on a whole dataset (for drift analysis)");
  add_lda_options(lda, c);
  lda->add_option("--seed", c.seed, "Sampler seed");
  lda->add_flag("--paper-mode", c.paper_mode, "Also train on the held-out posts");
  lda->add_option("--out", c.out, "Model snapshot to write")->required();
  lda->callback([&] { run = cmd_lda; });

  auto* rec = app.add_subcommand("recommend", "Write top-k tags for every test post");
  add_rec_options(rec, c, o);
  rec->add_option("--out", c.out, "Predictions TSV to write")->required();
  rec->callback([&] { run = cmd_recommend; });

  auto* eval = app.add_subcommand("eval", "Evaluate algorithms on a split");
  add_rec_options(eval, c, o);
  eval->add_flag("--curves", o.curves, "Also write curves.tsv (recall/precision for k = 1..10)");
  eval->add_flag("--sig", o.significance, "Pairwise Wilcoxon rank-sum tests");
  eval->add_flag("--strict-precision", o.strict_precision, "Divide P@k by k even for short lists");
  eval->add_option("--out", c.out, "Output directory for report.json, report.tsv, curves.tsv")->required();
  eval->callback([&] { run = cmd_eval; });

  auto* drift = app.add_subcommand("drift", "Gist vs verbatim similarity by lag");
  drift->add_option("--dataset", o.input, "Dataset snapshot")->required();
  drift->add_option("--model", o.model, "Topic model trained on this dataset or a split of it")->required();
  drift->add_option("--max-lag", o.max_lag, "Largest lag in bookmarks and days");
  drift->add_option("--out", c.out, "Drift TSV to write")->required();
  drift->callback([&] { run = cmd_drift; });

  auto* gen = app.add_subcommand("gen-fixture", "Write the synthetic drift fixture as a TAS file");
  gen->add_option("--users", o.fixture_users, "Number of users");
  gen->add_option("--posts", o.fixture_posts, "Posts per user");
  gen->add_option("--seed", c.seed, "Generator seed");
  gen->add_option("--out", c.out, "TAS file to write")->required();
  gen->callback([&] { run = cmd_gen_fixture; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", kConfig, e.what());
  }

  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  try {
    run(o);
  } catch (const MissingInputError& e) {
    return fail("missing_input", kMissingInput, e.what());
  } catch (const ConfigError& e) {
    return fail("config", kConfig, e.what());
  } catch (const FingerprintError& e) {
    return fail("fingerprint", kFingerprint, e.what());
  } catch (const ParseError& e) {
    return fail("parse", kData, e.what());
  } catch (const EmptyDatasetError& e) {
    return fail("empty_dataset", kData, e.what());
  } catch (const std::exception& e) {
    return fail("internal", kOther, e.what());
  }
  return kOk;
}
