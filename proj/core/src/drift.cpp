#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tagrec/evaluation.hpp"

namespace tagrec {

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Cosine of two binary vectors given as tag sets.
double set_cosine(std::span<const TagId> a, std::span<const TagId> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t common = 0;
  for (TagId t : a) common += std::find(b.begin(), b.end(), t) != b.end();
  return static_cast<double>(common) /
         std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

struct Bucket {
  double gist = 0.0;
  double verbatim = 0.0;
  std::size_t users = 0;
};

}  // namespace

std::vector<DriftRow> drift_analysis(const Folksonomy& f, const TopicModel& model,
                                     std::size_t max_lag) {
  std::map<std::size_t, Bucket> by_index, by_day;
  for (UserId u : f.active_users()) {
    const auto list = f.user_posts(u);
    if (list.size() < 2) continue;
    const Post& recent = f.posts()[list.back()];
    const auto recent_gist = resource_topics(model, f, recent.resource);

    struct DayAcc {
      double gist = 0.0, verbatim = 0.0;
      std::size_t n = 0;
    };
    std::map<std::size_t, DayAcc> days;
    for (std::size_t lag = 1; lag < list.size(); ++lag) {
      const Post& past = f.posts()[list[list.size() - 1 - lag]];
      const auto gist_vec = resource_topics(model, f, past.resource);
      const double gist = cosine(recent_gist, gist_vec);
      const double verbatim = set_cosine(recent.tags, past.tags);
      if (lag <= max_lag) {
        auto& b = by_index[lag];
        b.gist += gist;
        b.verbatim += verbatim;
        ++b.users;
      }
      const auto day = static_cast<std::size_t>((recent.timestamp - past.timestamp) / kSecondsPerDay);
      if (day <= max_lag) {
        auto& d = days[day];
        d.gist += gist;
        d.verbatim += verbatim;
        ++d.n;
      }
    }
    for (const auto& [day, acc] : days) {
      auto& b = by_day[day];
      b.gist += acc.gist / static_cast<double>(acc.n);
      b.verbatim += acc.verbatim / static_cast<double>(acc.n);
      ++b.users;
    }
  }

  std::vector<DriftRow> rows;
  auto emit = [&](LagKind kind, const std::map<std::size_t, Bucket>& buckets) {
    for (const auto& [lag, b] : buckets) {
      const double n = static_cast<double>(b.users);
      rows.push_back({kind, lag, b.gist / n, b.verbatim / n, b.users});
    }
  };
  emit(LagKind::bookmarks, by_index);
  emit(LagKind::days, by_day);
  return rows;
}

}  // namespace tagrec
