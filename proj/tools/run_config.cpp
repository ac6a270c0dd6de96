#include "run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

#include "tagrec/fingerprint.hpp"
#include "tagrec/folksonomy.hpp"
#include "tagrec/recommenders.hpp"
#include "tagrec/threelayers.hpp"

namespace tagrec::cli {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void RunConfig::validate() const {
  if (topics < 2) throw ConfigError("--topics must be at least 2");
  if (!(alpha >= 0.0)) throw ConfigError("--alpha must be >= 0 (0 selects 50/Z)");
  if (!(eta > 0.0)) throw ConfigError("--eta must be positive");
  if (iterations == 0) throw ConfigError("--iterations must be positive");
  if (!(d > 0.0)) throw ConfigError("--d must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("--beta must lie in [0, 1]");
  if (k == 0) throw ConfigError("--k must be positive");
  if (b_min == 0) throw ConfigError("--b-min must be at least 1");
  if (!parse_recency(recency)) throw ConfigError("unknown recency scale: " + recency);
  for (const auto& a : algos)
    if (!parse_algorithm(a)) throw ConfigError("unknown algorithm: " + a);
}

std::string RunConfig::serialize() const {
  std::ostringstream s;
  std::string algo_list;
  for (const auto& a : algos) algo_list += (algo_list.empty() ? "" : ",") + a;
  s << "dataset=" << dataset << " blacklist=" << (blacklist.empty() ? "default" : blacklist)
    << " topics=" << topics << " alpha=" << (alpha > 0 ? format_double(alpha) : "auto")
    << " eta=" << format_double(eta) << " iterations=" << iterations << " seed=" << seed
    << " d=" << format_double(d) << " beta=" << format_double(beta) << " k=" << k
    << " b_min=" << b_min << " algos=" << (algo_list.empty() ? "-" : algo_list)
    << " paper_mode=" << (paper_mode ? "true" : "false") << " recency=" << recency;
  return s.str();
}

std::string RunConfig::fingerprint() const { return fingerprint_of(command + '\n' + serialize()); }

std::vector<std::string> RunConfig::header() const {
  return {"tool: tagrec", "command: " + command, "config: " + serialize(),
          "run_fingerprint: " + fingerprint()};
}

void require_input(const std::filesystem::path& p) {
  std::error_code ec;
  if (p.empty() || !std::filesystem::exists(p, ec)) throw MissingInputError(p);
}

Header input_header(const std::filesystem::path& p) {
  require_input(p);
  return read_header(p);
}

std::string header_value(const Header& h, const std::string& key, const std::filesystem::path& from) {
  const auto it = h.find(key);
  if (it == h.end()) throw FingerprintError(from.string() + " has no '" + key + "' header");
  return it->second;
}

std::size_t workers_from_env() {
  const char* raw = std::getenv("TAGREC_WORKERS");
  if (!raw || !*raw) return 1;
  std::size_t n = 0;
  const std::string_view s(raw);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("TAGREC_WORKERS must be a non-negative integer, got '" + std::string(s) + "'");
  return n;
}

}  // namespace tagrec::cli
