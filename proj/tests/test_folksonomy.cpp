#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "tagrec/folksonomy.hpp"

using namespace tagrec;
using testutil::Row;

namespace {

std::string tas(std::initializer_list<const char*> lines) {
  std::string s;
  for (const char* l : lines) (s += l) += '\n';
  return s;
}

// Random string-level posts over small vocabularies.
std::vector<Row> random_rows(std::mt19937_64& rng, std::size_t n_posts, std::size_t n_users,
                             std::size_t n_resources, std::size_t n_tags) {
  std::vector<Row> rows;
  std::uniform_int_distribution<std::size_t> u(0, n_users - 1), r(0, n_resources - 1),
      t(0, n_tags - 1), len(1, 4);
  std::uniform_int_distribution<Timestamp> ts(1, 5000);
  for (std::size_t i = 0; i < n_posts; ++i) {
    Row row{"u" + std::to_string(u(rng)), "r" + std::to_string(r(rng)), {}, ts(rng)};
    const auto n = len(rng);
    for (std::size_t j = 0; j < n; ++j) row.tags.push_back("t" + std::to_string(t(rng)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_SUITE("folksonomy") {

TEST_CASE("rows sharing a user and resource form one post") {
  auto f = testutil::ingest_text(tas({"u1\tr1\ta\t5", "u1\tr1\tb\t5", "u1\tr1\tc\t5"}));
  REQUIRE(f.posts().size() == 1);
  std::vector<std::string> names;
  for (auto t : f.posts()[0].tags) names.push_back(f.vocab().tag_name(t));
  CHECK(names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("group timestamp is the minimum row timestamp") {
  auto f = testutil::ingest_text(tas({"u1\tr1\ta\t100", "u1\tr1\tb\t90", "u1\tr1\tc\t110"}));
  REQUIRE(f.posts().size() == 1);
  CHECK(f.posts()[0].timestamp == 90);
}

TEST_CASE("stats match a recount of a 2x2x2 dataset") {
  std::string text;
  std::size_t rows = 0;
  for (const char* u : {"u1", "u2"})
    for (const char* r : {"r1", "r2"})
      for (const char* t : {"x", "y"}) {
        text += std::string(u) + "\t" + r + "\t" + t + "\t1\n";
        ++rows;
      }
  auto f = testutil::ingest_text(text);
  const auto s = f.stats();
  CHECK(s.bookmarks == 4);
  CHECK(s.assignments == rows);
  CHECK(s.users == 2);
  CHECK(s.resources == 2);
  CHECK(s.tags == 2);
}

TEST_CASE("malformed rows report their line number") {
  SUBCASE("too few fields") {
    try {
      testutil::ingest_text(tas({"# header", "u1\tr1\ta\t1", "u1\tr1\tb"}));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("bad timestamp") {
    try {
      testutil::ingest_text(tas({"u1\tr1\ta\tyesterday"}));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("negative timestamp") {
    CHECK_THROWS_AS(testutil::ingest_text(tas({"u1\tr1\ta\t-4"})), ParseError);
  }
}

TEST_CASE("empty input is an empty-dataset error") {
  CHECK_THROWS_AS(testutil::ingest_text(""), EmptyDatasetError);
  CHECK_THROWS_AS(testutil::ingest_text(tas({"# only a comment", ""})), EmptyDatasetError);
  // Every tag blacklisted: nothing survives.
  CHECK_THROWS_AS(testutil::ingest_text(tas({"u\tr\tno-tag\t1", "u\tr\tImported\t2"})),
                  EmptyDatasetError);
}

TEST_CASE("blacklisted tags are dropped but the rest of the post survives") {
  auto f = testutil::ingest_text(tas({"u1\tr1\tBibTeX-Import\t1", "u1\tr1\tgraphs\t1"}));
  REQUIRE(f.posts().size() == 1);
  CHECK(f.posts()[0].tags.size() == 1);
  CHECK(f.vocab().tag_name(f.posts()[0].tags[0]) == "graphs");
}

TEST_CASE("crlf line endings are accepted") {
  auto f = testutil::ingest_text("u1\tr1\ta\t7\r\nu1\tr1\tb\t7\r\n");
  REQUIRE(f.posts().size() == 1);
  CHECK(f.posts()[0].timestamp == 7);
}

TEST_CASE("normalize_tag") {
  const auto bl = default_blacklist();
  CHECK_FALSE(normalize_tag("BibTeX-Import", bl).has_value());
  CHECK_FALSE(normalize_tag("no-tag", bl).has_value());
  CHECK(normalize_tag("Recommender", bl) == "recommender");
  CHECK(normalize_tag("  LDA  ", bl) == "lda");
  CHECK_FALSE(normalize_tag("   ", bl).has_value());
  CHECK(normalize_tag("public", {}) == "public");
}

TEST_CASE("normalize_tag is idempotent") {
  const auto bl = default_blacklist();
  std::mt19937_64 rng(11);
  const std::string alphabet = " \tAbCxyz-:_IMPORTED";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 12);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = len(rng);
    for (std::size_t j = 0; j < n; ++j) s += alphabet[pick(rng)];
    const auto once = normalize_tag(s, bl);
    if (!once) continue;
    CHECK(normalize_tag(*once, bl) == once);
  }
}

TEST_CASE("duplicate user-resource posts collapse to the latest") {
  auto f = testutil::make_folksonomy({{"u", "r", {"old"}, 5}, {"u", "r", {"new"}, 10}, {"u", "s", {"x"}, 1}});
  REQUIRE(f.posts().size() == 2);
  for (const auto& p : f.posts())
    if (p.resource == testutil::resource(f, "r")) CHECK(p.timestamp == 10);
  CHECK(f.stats().assignments == 2);
  // The discarded post's tag has no assignments left.
  CHECK(f.tag_freq()[idx(testutil::tag(f, "old"))] == 0);
}

TEST_CASE("frequency indices equal a brute-force recount") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = random_rows(rng, 1 + rng() % 1000, 15, 40, 30);
    const auto f = testutil::make_folksonomy(rows);
    // Oracle: collapse by hand, then count.
    std::map<std::pair<std::string, std::string>, Row> latest;
    for (const auto& r : rows) {
      auto [it, ins] = latest.emplace(std::pair{r.user, r.resource}, r);
      if (!ins && it->second.ts <= r.ts) it->second = r;
    }
    std::map<std::string, std::map<std::string, std::uint32_t>> by_res, by_user;
    std::map<std::string, std::uint64_t> global;
    std::size_t tas = 0;
    for (auto& [key, r] : latest) {
      std::set<std::string> tags(r.tags.begin(), r.tags.end());
      for (const auto& t : tags) {
        ++by_res[r.resource][t];
        ++by_user[r.user][t];
        ++global[t];
        ++tas;
      }
    }
    CHECK(f.stats().bookmarks == latest.size());
    CHECK(f.stats().assignments == tas);
    for (std::size_t r = 0; r < f.vocab().resources.size(); ++r) {
      std::map<std::string, std::uint32_t> got;
      for (auto tc : f.resource_tag_freq(make_id<ResourceId>(r))) got[f.vocab().tag_name(tc.tag)] = tc.count;
      CHECK(got == by_res[f.vocab().resources.name(r)]);
    }
    for (std::size_t u = 0; u < f.vocab().users.size(); ++u) {
      std::map<std::string, std::uint32_t> got;
      for (auto tc : f.user_tag_freq(make_id<UserId>(u))) got[f.vocab().tag_name(tc.tag)] = tc.count;
      CHECK(got == by_user[f.vocab().users.name(u)]);
    }
    for (std::size_t t = 0; t < f.vocab().tags.size(); ++t)
      CHECK(f.tag_freq()[t] == global[f.vocab().tags.name(t)]);
  }
}

TEST_CASE("snapshot round trip reproduces posts and ids") {
  std::mt19937_64 rng(5);
  const auto rows = random_rows(rng, 300, 10, 30, 20);
  std::string text;
  for (const auto& r : rows)
    for (const auto& t : r.tags) text += r.user + "\t" + r.resource + "\t" + t + "\t" + std::to_string(r.ts) + "\n";
  const auto f1 = testutil::ingest_text(text);
  std::ostringstream s1;
  write_snapshot(s1, f1);
  const auto f2 = testutil::ingest_text(s1.str());
  std::ostringstream s2;
  write_snapshot(s2, f2);
  const auto f3 = testutil::ingest_text(s2.str());

  CHECK(s1.str() == s2.str());
  CHECK(f1.fingerprint() == f2.fingerprint());
  // Once canonical, ids are stable across further round trips.
  REQUIRE(f2.posts().size() == f3.posts().size());
  CHECK(std::equal(f2.posts().begin(), f2.posts().end(), f3.posts().begin()));
  CHECK(f2.vocab().tags.size() == f3.vocab().tags.size());
  for (std::size_t t = 0; t < f2.vocab().tags.size(); ++t) CHECK(f2.vocab().tags.name(t) == f3.vocab().tags.name(t));
  // The first ingest carries the same posts at name level.
  auto names = [](const Folksonomy& f) {
    std::set<std::tuple<std::string, std::string, std::set<std::string>, Timestamp>> out;
    for (const auto& p : f.posts()) {
      std::set<std::string> tags;
      for (auto t : p.tags) tags.insert(f.vocab().tag_name(t));
      out.emplace(f.vocab().user_name(p.user), f.vocab().resource_name(p.resource), tags, p.timestamp);
    }
    return out;
  };
  CHECK(names(f1) == names(f2));
}

TEST_CASE("fingerprint ignores input order and changes with content") {
  std::mt19937_64 rng(8);
  auto rows = random_rows(rng, 100, 6, 20, 10);
  const auto a = testutil::make_folksonomy(rows);
  std::shuffle(rows.begin(), rows.end(), rng);
  // Duplicate pairs may resolve differently when timestamps tie, so compare
  // only on rows with distinct (user, resource) keys.
  std::map<std::pair<std::string, std::string>, Row> uniq;
  for (auto& r : rows) uniq[{r.user, r.resource}] = r;
  std::vector<Row> v;
  for (auto& [k, r] : uniq) v.push_back(r);
  const auto b = testutil::make_folksonomy(v);
  std::reverse(v.begin(), v.end());
  const auto c = testutil::make_folksonomy(v);
  CHECK(b.fingerprint() == c.fingerprint());
  v[0].ts += 1;
  CHECK(testutil::make_folksonomy(v).fingerprint() != c.fingerprint());
  CHECK(a.fingerprint().size() == 16);
}

TEST_CASE("leave-one-out split") {
  SUBCASE("most recent post goes to test") {
    auto f = testutil::make_folksonomy({{"u", "a", {"x"}, 1}, {"u", "b", {"x"}, 2}, {"u", "c", {"x"}, 3}});
    auto s = leave_one_out_split(f);
    REQUIRE(s.test.size() == 1);
    CHECK(s.test[0].timestamp == 3);
    CHECK(s.train.posts().size() == 2);
  }
  SUBCASE("single-post user is cold start") {
    auto f = testutil::make_folksonomy({{"solo", "a", {"x"}, 1}, {"u", "b", {"x"}, 2}, {"u", "c", {"y"}, 3}});
    auto s = leave_one_out_split(f);
    CHECK(s.test.size() == 2);
    CHECK(s.train.user_posts(testutil::user(f, "solo")).empty());
    CHECK(std::find(s.train.active_users().begin(), s.train.active_users().end(), testutil::user(f, "solo")) ==
          s.train.active_users().end());
  }
  SUBCASE("5 users with 12 posts") {
    std::vector<Row> rows;
    const int counts[] = {1, 2, 3, 3, 3};
    for (int u = 0; u < 5; ++u)
      for (int i = 0; i < counts[u]; ++i)
        rows.push_back({"u" + std::to_string(u), "r" + std::to_string(i), {"t"}, 10 * i + u});
    auto s = leave_one_out_split(testutil::make_folksonomy(rows));
    CHECK(s.test.size() == 5);
    CHECK(s.train.posts().size() == 7);
  }
  SUBCASE("timestamp ties pick the larger resource id") {
    auto f = testutil::make_folksonomy({{"u", "first", {"x"}, 4}, {"u", "second", {"x"}, 4}});
    auto s = leave_one_out_split(f);
    REQUIRE(s.test.size() == 1);
    CHECK(s.test[0].resource == testutil::resource(f, "second"));
  }
}

TEST_CASE("split partitions posts and respects time") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = testutil::make_folksonomy(random_rows(rng, 1 + rng() % 400, 12, 50, 15));
    const auto s = leave_one_out_split(f);
    std::vector<Post> all(s.train.posts().begin(), s.train.posts().end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    auto key = [](const Post& p) { return std::tuple(idx(p.user), idx(p.resource), p.timestamp); };
    std::vector<std::tuple<std::size_t, std::size_t, Timestamp>> got, want;
    for (auto& p : all) got.push_back(key(p));
    for (auto& p : f.posts()) want.push_back(key(p));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);

    std::set<std::size_t> test_users;
    for (const auto& p : s.test) {
      CHECK(test_users.insert(idx(p.user)).second);
      for (auto i : s.train.user_posts(p.user)) CHECK(s.train.posts()[i].timestamp <= p.timestamp);
    }
    CHECK(std::is_sorted(s.test.begin(), s.test.end(),
                         [](const Post& a, const Post& b) { return idx(a.user) < idx(b.user); }));
  }
}

TEST_CASE("filter_test_users") {
  auto build = [](std::initializer_list<int> posts_per_user) {
    std::vector<Row> rows;
    int u = 0;
    for (int n : posts_per_user) {
      for (int i = 0; i < n; ++i)
        rows.push_back({"u" + std::to_string(u), "r" + std::to_string(i), {"t"}, i});
      ++u;
    }
    return leave_one_out_split(testutil::make_folksonomy(rows));
  };
  SUBCASE("b_min 1 is the identity") {
    auto s = build({1, 4, 9});
    CHECK(filter_test_users(s, 1) == s.test);
  }
  SUBCASE("boundary") {
    CHECK(filter_test_users(build({19}), 20).empty());
    CHECK(filter_test_users(build({20}), 20).size() == 1);
  }
  SUBCASE("mixed population") { CHECK(filter_test_users(build({5, 20, 21}), 20).size() == 2); }
  SUBCASE("zero is rejected") { CHECK_THROWS_AS(filter_test_users(build({3}), 0), ConfigError); }
}

TEST_CASE("sample_users") {
  std::mt19937_64 rng(2);
  const auto f = testutil::make_folksonomy(random_rows(rng, 500, 40, 60, 20));
  CHECK(sample_users(f, 1.0, 9).posts().size() == f.posts().size());
  const auto a = sample_users(f, 0.25, 9);
  const auto b = sample_users(f, 0.25, 9);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.active_users().size() == static_cast<std::size_t>(std::ceil(0.25 * f.active_users().size())));
  for (auto u : a.active_users()) CHECK(a.user_posts(u).size() == f.user_posts(u).size());
  CHECK_THROWS_AS(sample_users(f, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(sample_users(f, 1.5, 1), ConfigError);
}

TEST_CASE("header lines are read back") {
  std::istringstream in("# fingerprint: abc\n# note: a: b\nu\tr\tt\t1\n");
  const auto h = read_header(in);
  CHECK(h.at("fingerprint") == "abc");
  CHECK(h.at("note") == "a: b");
}

}  // TEST_SUITE
