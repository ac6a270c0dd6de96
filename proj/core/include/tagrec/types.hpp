#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tagrec {

// Dense identifiers. Values are indices into the owning Vocabulary.
enum class UserId : std::uint32_t {};
enum class ResourceId : std::uint32_t {};
enum class TagId : std::uint32_t {};

template <typename Id>
constexpr std::size_t idx(Id id) noexcept {
  return static_cast<std::size_t>(id);
}

template <typename Id>
constexpr Id make_id(std::size_t i) noexcept {
  return static_cast<Id>(static_cast<std::uint32_t>(i));
}

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

struct TagCount {
  TagId tag;
  std::uint32_t count;

  friend bool operator==(const TagCount&, const TagCount&) = default;
};

struct ScoredTag {
  TagId tag;
  double score;

  friend bool operator==(const ScoredTag&, const ScoredTag&) = default;
};

/// Scores in non-increasing order, ties by ascending tag id.
using RankedTags = std::vector<ScoredTag>;

// Error hierarchy. The CLI maps each kind to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FingerprintError : public Error {
 public:
  using Error::Error;
};

}  // namespace tagrec
