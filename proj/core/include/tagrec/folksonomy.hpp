#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tagrec/types.hpp"

namespace tagrec {

/// Bidirectional string <-> dense id map; ids are assigned in first-seen order.
class Vocabulary {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Vocabularies {
  Vocabulary users;
  Vocabulary resources;
  Vocabulary tags;

  const std::string& user_name(UserId u) const { return users.name(idx(u)); }
  const std::string& resource_name(ResourceId r) const { return resources.name(idx(r)); }
  const std::string& tag_name(TagId t) const { return tags.name(idx(t)); }
};

/// One bookmark: a user annotating a resource with a set of tags.
struct Post {
  UserId user{};
  ResourceId resource{};
  std::vector<TagId> tags;  // non-empty, duplicate-free, insertion order
  Timestamp timestamp = 0;

  friend bool operator==(const Post&, const Post&) = default;
};

/// A post at string level, before vocabulary interning.
struct RawPost {
  std::string user;
  std::string resource;
  std::vector<std::string> tags;
  Timestamp timestamp = 0;

  friend bool operator==(const RawPost&, const RawPost&) = default;
};

struct FolksonomyStats {
  std::size_t bookmarks = 0;   // |B|
  std::size_t users = 0;       // |U|
  std::size_t resources = 0;   // |R|
  std::size_t tags = 0;        // |T|
  std::size_t assignments = 0; // |TAS|
};

/// Immutable, indexed collection of posts. All indices are derived from the
/// post list at construction; the vocabularies may be shared with other
/// folksonomies (e.g. the train and test side of a split).
class Folksonomy {
 public:
  Folksonomy();
  /// Posts sharing a (user, resource) pair collapse to the latest-timestamped
  /// one. Tags inside a post are deduplicated.
  Folksonomy(std::shared_ptr<const Vocabularies> vocab, std::vector<Post> posts);

  const Vocabularies& vocab() const noexcept { return *vocab_; }
  const std::shared_ptr<const Vocabularies>& vocab_ptr() const noexcept { return vocab_; }

  std::span<const Post> posts() const noexcept { return posts_; }
  bool empty() const noexcept { return posts_.empty(); }

  /// Indices into posts(), ordered by (timestamp, resource id).
  std::span<const std::size_t> user_posts(UserId u) const;
  /// Indices into posts(), ascending.
  std::span<const std::size_t> resource_posts(ResourceId r) const;
  /// Tag frequencies of the resource's assignments, sorted by tag id.
  std::span<const TagCount> resource_tag_freq(ResourceId r) const;
  /// Tag frequencies of the user's assignments, sorted by tag id.
  std::span<const TagCount> user_tag_freq(UserId u) const;
  /// Global tag frequencies indexed by tag id (size = vocab().tags.size()).
  std::span<const std::uint64_t> tag_freq() const noexcept { return tag_freq_; }

  /// Users with at least one post, ascending id.
  std::span<const UserId> active_users() const noexcept { return active_users_; }

  FolksonomyStats stats() const;

  /// FNV-1a over the canonical snapshot; stable across vocabulary id order.
  std::string fingerprint() const;

 private:
  std::shared_ptr<const Vocabularies> vocab_;
  std::vector<Post> posts_;
  std::vector<std::vector<std::size_t>> user_posts_;
  std::vector<std::vector<std::size_t>> resource_posts_;
  std::vector<std::vector<TagCount>> resource_tag_freq_;
  std::vector<std::vector<TagCount>> user_tag_freq_;
  std::vector<std::uint64_t> tag_freq_;
  std::vector<UserId> active_users_;
  std::size_t assignments_ = 0;
};

// ---------------------------------------------------------------------------
// Normalization and ingestion

/// Automatically generated tags dropped by default.
std::set<std::string, std::less<>> default_blacklist();

/// Lowercases (ASCII) and trims surrounding whitespace. Returns nullopt when
/// the result is empty or blacklisted. The blacklist is matched against the
/// normalized form.
std::optional<std::string> normalize_tag(std::string_view raw,
                                         const std::set<std::string, std::less<>>& blacklist);

struct IngestOptions {
  std::set<std::string, std::less<>> blacklist = default_blacklist();
};

/// Parses `user TAB resource TAB tag TAB timestamp` rows and groups them by
/// (user, resource). A group's timestamp is the minimum row timestamp.
/// Blank lines and lines starting with '#' are skipped. Rows whose tag
/// normalizes away are dropped, as are groups left without tags.
/// Throws ParseError on malformed rows.
std::vector<RawPost> read_tas_rows(std::istream& in, const IngestOptions& options = {});

/// Reads the leading `# key: value` header lines of a snapshot file.
std::map<std::string, std::string> read_header(std::istream& in);
std::map<std::string, std::string> read_header(const std::filesystem::path& path);

/// Interns raw posts into `vocab` (users, resources and tags in first-seen
/// order) and returns the id-level posts.
std::vector<Post> intern_posts(const std::vector<RawPost>& raw, Vocabularies& vocab);

/// Reads a TAS file into a folksonomy with its own vocabulary.
/// Throws EmptyDatasetError if no post survives.
Folksonomy ingest(std::istream& in, const IngestOptions& options = {});
Folksonomy ingest(const std::filesystem::path& path, const IngestOptions& options = {});

/// Writes one TAS row per (post, tag), sorted by (user, timestamp, resource,
/// tag) on names. Header lines are emitted verbatim, each prefixed with "# ".
void write_posts(std::ostream& out, const Vocabularies& vocab, std::span<const Post> posts,
                 const std::vector<std::string>& header = {});
void write_snapshot(std::ostream& out, const Folksonomy& f,
                    const std::vector<std::string>& header = {});

/// Keeps a seeded random subset of users (fraction in (0, 1]).
Folksonomy sample_users(const Folksonomy& f, double fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Splitting

struct DatasetSplit {
  Folksonomy train;
  std::vector<Post> test;  // at most one per user, ascending user id
};

/// Moves each user's most recent post (ties: larger resource id) to the test
/// side. Single-post users contribute a test post and no training data.
DatasetSplit leave_one_out_split(const Folksonomy& f);

/// Test posts whose user has at least b_min posts across train and test.
/// Throws ConfigError if b_min == 0.
std::vector<Post> filter_test_users(const DatasetSplit& split, std::size_t b_min);

/// Loads a split written as two TAS files, interning train before test so
/// that ids are reproducible.
DatasetSplit load_split(const std::filesystem::path& train, const std::filesystem::path& test,
                        const IngestOptions& options = {});

}  // namespace tagrec
