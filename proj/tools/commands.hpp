#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "run_config.hpp"

namespace tagrec::cli {

/// Inputs and switches beyond the shared run configuration.
struct CommandOptions {
  RunConfig config;
  std::string input;      // ingest: raw TAS file
  std::string split_dir;  // directory holding train.tsv and test.tsv
  std::string model;      // model snapshot
  double sample_users = 1.0;
  bool curves = false;
  bool significance = false;
  bool strict_precision = false;
  std::size_t max_lag = 100;
  // gen-fixture
  std::size_t fixture_users = 10;
  std::size_t fixture_posts = 20;
};

// Each command validates its configuration first, then reads inputs and
// writes its outputs under config.out. Errors are reported by exception.
void cmd_ingest(const CommandOptions& o);
void cmd_split(const CommandOptions& o);
void cmd_lda(const CommandOptions& o);
void cmd_recommend(const CommandOptions& o);
void cmd_eval(const CommandOptions& o);
void cmd_drift(const CommandOptions& o);
void cmd_gen_fixture(const CommandOptions& o);

}  // namespace tagrec::cli
