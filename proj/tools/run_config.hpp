#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagrec/types.hpp"

namespace tagrec::cli {

/// Process exit codes, one per error class.
enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kMissingInput = 3,
  kFingerprint = 4,
  kData = 5,
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::filesystem::path& p)
      : Error("missing input: " + p.string()) {}
};

/// Every parameter a run can depend on. Each command fills the fields it
/// uses; all fields are serialized so a header states the complete run.
struct RunConfig {
  std::string command;
  std::string dataset;    // input path as given
  std::string blacklist;  // path, empty for the built-in list
  std::size_t topics = 100;
  double alpha = 0.0;  // <= 0: 50 / topics
  double eta = 0.01;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  double d = 0.5;
  double beta = 0.5;
  std::size_t k = 10;
  std::size_t b_min = 1;
  std::vector<std::string> algos;
  bool paper_mode = false;
  std::string recency = "power";
  std::string out;  // recorded but not part of the fingerprint

  /// Throws ConfigError on the first invalid value.
  void validate() const;
  /// One line of `key=value` pairs in a fixed order, without the output path.
  std::string serialize() const;
  std::string fingerprint() const;
  /// Header lines for output files: tool, command, config, run fingerprint.
  std::vector<std::string> header() const;
};

/// Throws MissingInputError unless the path exists.
void require_input(const std::filesystem::path& p);

using Header = std::map<std::string, std::string>;

/// Reads the `# key: value` header of an existing input file.
Header input_header(const std::filesystem::path& p);

/// Value of `key` in a header; throws FingerprintError naming the file if absent.
std::string header_value(const Header& h, const std::string& key, const std::filesystem::path& from);

/// Worker count from TAGREC_WORKERS (default 1; 0 = all cores).
std::size_t workers_from_env();

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace tagrec::cli
