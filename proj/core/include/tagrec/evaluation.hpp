#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tagrec/folksonomy.hpp"
#include "tagrec/ranking.hpp"
#include "tagrec/topics.hpp"

namespace tagrec {

inline constexpr std::size_t kMaxCutoff = 10;

/// One held-out post with an algorithm's prediction for it.
struct EvalCase {
  UserId user{};
  ResourceId resource{};
  std::vector<TagId> true_tags;
  RankedTags predicted;
};

enum class PrecisionMode {
  returned,  // divide by min(k, |predicted|)
  strict,    // divide by k
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

PrecisionRecall precision_recall_at_k(const EvalCase& c, std::size_t k,
                                      PrecisionMode mode = PrecisionMode::returned);
double f1_at_5(const EvalCase& c, PrecisionMode mode = PrecisionMode::returned);
/// (1/|true|) * sum of 1/rank over true tags found in the top 10.
double reciprocal_rank(const EvalCase& c);
/// (1/|true|) * sum over hit positions p <= 10 of P@p.
double average_precision(const EvalCase& c);

// ---------------------------------------------------------------------------

struct AlgorithmMetrics {
  std::string name;
  std::array<double, kMaxCutoff> recall{};     // index k-1
  std::array<double, kMaxCutoff> precision{};  // index k-1
  double f1_at_5 = 0.0;
  double mrr = 0.0;
  double map = 0.0;
  std::size_t n_cases = 0;
  std::size_t n_failures = 0;
  // Per-case values in case order, the populations for significance tests.
  std::vector<double> case_f1;
  std::vector<double> case_mrr;
  std::vector<double> case_map;
};

struct SignificanceResult {
  std::string first;
  std::string second;
  std::string metric;  // "f1@5", "mrr" or "map"
  double p_value = 1.0;
};

struct EvalReport {
  std::vector<AlgorithmMetrics> algorithms;
  std::vector<SignificanceResult> significance;
  std::map<std::string, std::string> metadata;  // config, fingerprints, notes
};

using Recommender = std::function<RankedTags(const Post& test_post)>;

struct NamedRecommender {
  std::string name;
  Recommender run;
};

struct EvalOptions {
  PrecisionMode precision_mode = PrecisionMode::returned;
  bool significance = false;
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 1;
};

/// Runs every recommender on every test post (top 10 kept). Aggregation uses
/// a fixed case order, so results do not depend on the worker count. A
/// recommender that throws on a case is recorded as an empty prediction and
/// counted in n_failures.
EvalReport evaluate(std::span<const NamedRecommender> algorithms, std::span<const Post> test,
                    const EvalOptions& options = {});

/// Aggregates already-computed cases (one algorithm).
AlgorithmMetrics aggregate(std::string name, std::span<const EvalCase> cases,
                           PrecisionMode mode = PrecisionMode::returned);

// ---------------------------------------------------------------------------
// Wilcoxon rank-sum (Mann-Whitney) test, two-sided.

/// Exact when |x| + |y| <= 12, otherwise the normal approximation.
/// Returns 1 when every value across both samples is identical.
/// Throws ConfigError if either sample is empty.
double wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y);
/// Enumerates all C(n, |x|) assignments of the pooled mid-ranks.
double wilcoxon_rank_sum_exact(std::span<const double> x, std::span<const double> y);
/// Normal approximation with tie and continuity correction.
double wilcoxon_rank_sum_normal(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Gist vs verbatim similarity drift

enum class LagKind { bookmarks, days };

struct DriftRow {
  LagKind kind = LagKind::bookmarks;
  std::size_t lag = 0;
  double mean_gist = 0.0;
  double mean_verbatim = 0.0;
  std::size_t n_users = 0;
};

/// For every user with at least two posts, compares the most recent post with
/// each earlier one: gist = cosine of resource topic vectors, verbatim =
/// cosine of binary tag vectors. Rows are bucketed by bookmark lag (1 = the
/// previous post, up to max_lag) and by floor(day lag) in [0, max_lag]. For
/// day buckets a user's posts are averaged before averaging across users.
/// Empty buckets are omitted.
std::vector<DriftRow> drift_analysis(const Folksonomy& f, const TopicModel& model,
                                     std::size_t max_lag = 100);

// ---------------------------------------------------------------------------
// Report files

void write_report_json(std::ostream& out, const EvalReport& report);
void write_report_tsv(std::ostream& out, const EvalReport& report);
/// One row per (algorithm, k) for k = 1..10.
void write_curves_tsv(std::ostream& out, const EvalReport& report);
void write_drift_tsv(std::ostream& out, std::span<const DriftRow> rows,
                     const std::vector<std::string>& header = {});

}  // namespace tagrec
