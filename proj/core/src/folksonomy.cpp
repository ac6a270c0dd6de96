#include "tagrec/folksonomy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "tagrec/fingerprint.hpp"

namespace tagrec {

std::uint32_t Vocabulary::intern(std::string_view name) {
  if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
  if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<TagCount> to_counts(std::map<TagId, std::uint32_t> const& m) {
  std::vector<TagCount> out;
  out.reserve(m.size());
  for (auto [tag, count] : m) out.push_back({tag, count});
  return out;
}

template <typename T>
std::span<const T> row_or_empty(const std::vector<std::vector<T>>& rows, std::size_t i) {
  if (i >= rows.size()) return {};
  return rows[i];
}

void dedup_in_order(std::vector<TagId>& tags) {
  std::vector<TagId> out;
  out.reserve(tags.size());
  for (TagId t : tags)
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  tags = std::move(out);
}

}  // namespace

Folksonomy::Folksonomy() : vocab_(std::make_shared<Vocabularies>()) {}

Folksonomy::Folksonomy(std::shared_ptr<const Vocabularies> vocab, std::vector<Post> posts)
    : vocab_(std::move(vocab)) {
  // Collapse duplicate (user, resource) pairs to the latest post; on equal
  // timestamps the later post in input order wins.
  std::map<std::pair<UserId, ResourceId>, std::size_t> latest;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    dedup_in_order(posts[i].tags);
    const auto key = std::pair{posts[i].user, posts[i].resource};
    auto [it, inserted] = latest.emplace(key, i);
    if (!inserted && posts[it->second].timestamp <= posts[i].timestamp) it->second = i;
  }
  std::vector<bool> keep(posts.size(), false);
  for (const auto& [key, i] : latest) keep[i] = true;
  for (std::size_t i = 0; i < posts.size(); ++i)
    if (keep[i] && !posts[i].tags.empty()) posts_.push_back(std::move(posts[i]));

  const std::size_t n_users = vocab_->users.size();
  const std::size_t n_resources = vocab_->resources.size();
  const std::size_t n_tags = vocab_->tags.size();
  user_posts_.resize(n_users);
  resource_posts_.resize(n_resources);
  tag_freq_.assign(n_tags, 0);
  std::vector<std::map<TagId, std::uint32_t>> rt(n_resources), ut(n_users);

  for (std::size_t i = 0; i < posts_.size(); ++i) {
    const Post& p = posts_[i];
    if (idx(p.user) >= n_users || idx(p.resource) >= n_resources)
      throw Error("post references an id outside the vocabulary");
    user_posts_[idx(p.user)].push_back(i);
    resource_posts_[idx(p.resource)].push_back(i);
    for (TagId t : p.tags) {
      if (idx(t) >= n_tags) throw Error("post references a tag outside the vocabulary");
      ++tag_freq_[idx(t)];
      ++rt[idx(p.resource)][t];
      ++ut[idx(p.user)][t];
      ++assignments_;
    }
  }
  for (auto& list : user_posts_) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return std::tuple(posts_[a].timestamp, idx(posts_[a].resource)) <
             std::tuple(posts_[b].timestamp, idx(posts_[b].resource));
    });
  }
  resource_tag_freq_.resize(n_resources);
  for (std::size_t r = 0; r < n_resources; ++r) resource_tag_freq_[r] = to_counts(rt[r]);
  user_tag_freq_.resize(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    user_tag_freq_[u] = to_counts(ut[u]);
    if (!user_posts_[u].empty()) active_users_.push_back(make_id<UserId>(u));
  }
}

std::span<const std::size_t> Folksonomy::user_posts(UserId u) const {
  return row_or_empty(user_posts_, idx(u));
}

std::span<const std::size_t> Folksonomy::resource_posts(ResourceId r) const {
  return row_or_empty(resource_posts_, idx(r));
}

std::span<const TagCount> Folksonomy::resource_tag_freq(ResourceId r) const {
  return row_or_empty(resource_tag_freq_, idx(r));
}

std::span<const TagCount> Folksonomy::user_tag_freq(UserId u) const {
  return row_or_empty(user_tag_freq_, idx(u));
}

FolksonomyStats Folksonomy::stats() const {
  FolksonomyStats s;
  s.bookmarks = posts_.size();
  s.users = active_users_.size();
  s.resources = static_cast<std::size_t>(std::count_if(
      resource_posts_.begin(), resource_posts_.end(), [](const auto& v) { return !v.empty(); }));
  s.tags = static_cast<std::size_t>(
      std::count_if(tag_freq_.begin(), tag_freq_.end(), [](auto c) { return c > 0; }));
  s.assignments = assignments_;
  return s;
}

std::string Folksonomy::fingerprint() const {
  std::ostringstream os;
  write_snapshot(os, *this);
  return fingerprint_of(os.str());
}

// ---------------------------------------------------------------------------

std::set<std::string, std::less<>> default_blacklist() {
  return {"no-tag", "bibtex-import", "imported", "public", "system:imported", "system:unfiled"};
}

std::optional<std::string> normalize_tag(std::string_view raw,
                                         const std::set<std::string, std::less<>>& blacklist) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = raw.find_first_not_of(ws);
  if (first == std::string_view::npos) return std::nullopt;
  const auto last = raw.find_last_not_of(ws);
  std::string out(raw.substr(first, last - first + 1));
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (blacklist.contains(out)) return std::nullopt;
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::vector<RawPost> read_tas_rows(std::istream& in, const IngestOptions& options) {
  std::vector<RawPost> groups;
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> by_key;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      throw ParseError(line_no, "empty user or resource id");
    Timestamp ts = 0;
    const auto* end = fields[3].data() + fields[3].size();
    const auto [ptr, ec] = std::from_chars(fields[3].data(), end, ts);
    if (ec != std::errc{} || ptr != end || ts < 0)
      throw ParseError(line_no, "invalid timestamp '" + std::string(fields[3]) + "'");

    auto tag = normalize_tag(fields[2], options.blacklist);
    if (!tag) continue;

    auto key = std::pair{std::string(fields[0]), std::string(fields[1])};
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      it = by_key.emplace(std::move(key), groups.size()).first;
      groups.push_back(RawPost{it->first.first, it->first.second, {}, ts});
    }
    RawPost& g = groups[it->second];
    g.timestamp = std::min(g.timestamp, ts);
    if (std::find(g.tags.begin(), g.tags.end(), *tag) == g.tags.end())
      g.tags.push_back(std::move(*tag));
  }
  return groups;
}

std::map<std::string, std::string> read_header(std::istream& in) {
  std::map<std::string, std::string> header;
  std::string line;
  while (in.peek() == '#' && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view body(line);
    body.remove_prefix(1);
    if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    const auto colon = body.find(": ");
    if (colon == std::string_view::npos) continue;
    header[std::string(body.substr(0, colon))] = std::string(body.substr(colon + 2));
  }
  return header;
}

std::map<std::string, std::string> read_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_header(in);
}

std::vector<Post> intern_posts(const std::vector<RawPost>& raw, Vocabularies& vocab) {
  std::vector<Post> posts;
  posts.reserve(raw.size());
  for (const RawPost& r : raw) {
    Post p;
    p.user = make_id<UserId>(vocab.users.intern(r.user));
    p.resource = make_id<ResourceId>(vocab.resources.intern(r.resource));
    p.timestamp = r.timestamp;
    for (const auto& t : r.tags) p.tags.push_back(make_id<TagId>(vocab.tags.intern(t)));
    posts.push_back(std::move(p));
  }
  return posts;
}

Folksonomy ingest(std::istream& in, const IngestOptions& options) {
  auto raw = read_tas_rows(in, options);
  if (raw.empty()) throw EmptyDatasetError("dataset contains no posts");
  auto vocab = std::make_shared<Vocabularies>();
  auto posts = intern_posts(raw, *vocab);
  return Folksonomy(std::move(vocab), std::move(posts));
}

Folksonomy ingest(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return ingest(in, options);
}

void write_posts(std::ostream& out, const Vocabularies& vocab, std::span<const Post> posts,
                 const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  struct Row {
    const std::string* user;
    Timestamp ts;
    const std::string* resource;
    const std::string* tag;
  };
  std::vector<Row> rows;
  for (const Post& p : posts)
    for (TagId t : p.tags)
      rows.push_back({&vocab.user_name(p.user), p.timestamp, &vocab.resource_name(p.resource),
                      &vocab.tag_name(t)});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(*a.user, a.ts, *a.resource, *a.tag) <
           std::tie(*b.user, b.ts, *b.resource, *b.tag);
  });
  for (const Row& r : rows)
    out << *r.user << '\t' << *r.resource << '\t' << *r.tag << '\t' << r.ts << '\n';
}

void write_snapshot(std::ostream& out, const Folksonomy& f, const std::vector<std::string>& header) {
  write_posts(out, f.vocab(), f.posts(), header);
}

Folksonomy sample_users(const Folksonomy& f, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError("user sample fraction must be in (0, 1]");
  std::vector<UserId> users(f.active_users().begin(), f.active_users().end());
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit index draw so the order is portable.
  for (std::size_t i = users.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(users[i - 1], users[j]);
  }
  const auto keep_n = static_cast<std::size_t>(std::ceil(fraction * users.size()));
  std::vector<bool> keep(f.vocab().users.size(), false);
  for (std::size_t i = 0; i < keep_n && i < users.size(); ++i) keep[idx(users[i])] = true;
  std::vector<Post> posts;
  for (const Post& p : f.posts())
    if (keep[idx(p.user)]) posts.push_back(p);
  return Folksonomy(f.vocab_ptr(), std::move(posts));
}

DatasetSplit leave_one_out_split(const Folksonomy& f) {
  DatasetSplit split;
  std::vector<bool> is_test(f.posts().size(), false);
  for (UserId u : f.active_users()) {
    const auto list = f.user_posts(u);
    // user_posts is sorted by (timestamp, resource id): the last entry is the
    // most recent post with the larger resource id on ties.
    const std::size_t last = list.back();
    is_test[last] = true;
    split.test.push_back(f.posts()[last]);
  }
  std::vector<Post> train;
  for (std::size_t i = 0; i < f.posts().size(); ++i)
    if (!is_test[i]) train.push_back(f.posts()[i]);
  split.train = Folksonomy(f.vocab_ptr(), std::move(train));
  return split;
}

std::vector<Post> filter_test_users(const DatasetSplit& split, std::size_t b_min) {
  if (b_min == 0) throw ConfigError("b_min must be at least 1");
  std::vector<Post> kept;
  for (const Post& p : split.test) {
    const std::size_t total = split.train.user_posts(p.user).size() + 1;
    if (total >= b_min) kept.push_back(p);
  }
  return kept;
}

DatasetSplit load_split(const std::filesystem::path& train_path,
                        const std::filesystem::path& test_path, const IngestOptions& options) {
  auto read = [&](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    return read_tas_rows(in, options);
  };
  const auto train_raw = read(train_path);
  const auto test_raw = read(test_path);
  if (test_raw.empty()) throw EmptyDatasetError("test set contains no posts");
  auto vocab = std::make_shared<Vocabularies>();
  auto train_posts = intern_posts(train_raw, *vocab);
  auto test_posts = intern_posts(test_raw, *vocab);
  std::sort(test_posts.begin(), test_posts.end(),
            [](const Post& a, const Post& b) { return idx(a.user) < idx(b.user); });
  DatasetSplit split;
  split.train = Folksonomy(vocab, std::move(train_posts));
  split.test = std::move(test_posts);
  return split;
}

}  // namespace tagrec
