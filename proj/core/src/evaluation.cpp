#include "tagrec/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace tagrec {

namespace {

bool is_true(const EvalCase& c, TagId t) {
  return std::find(c.true_tags.begin(), c.true_tags.end(), t) != c.true_tags.end();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

PrecisionRecall precision_recall_at_k(const EvalCase& c, std::size_t k, PrecisionMode mode) {
  if (k == 0 || k > kMaxCutoff) throw ConfigError("cutoff k must lie in [1, 10]");
  if (c.true_tags.empty()) throw ConfigError("evaluation case without true tags");
  const std::size_t n = std::min(k, c.predicted.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += is_true(c, c.predicted[i].tag);
  PrecisionRecall pr;
  if (!c.predicted.empty()) {
    const std::size_t denom = mode == PrecisionMode::strict ? k : n;
    pr.precision = static_cast<double>(hits) / static_cast<double>(denom);
  }
  pr.recall = static_cast<double>(hits) / static_cast<double>(c.true_tags.size());
  return pr;
}

double f1_at_5(const EvalCase& c, PrecisionMode mode) {
  const auto pr = precision_recall_at_k(c, 5, mode);
  if (pr.precision + pr.recall == 0.0) return 0.0;
  return 2.0 * pr.precision * pr.recall / (pr.precision + pr.recall);
}

double reciprocal_rank(const EvalCase& c) {
  if (c.true_tags.empty()) throw ConfigError("evaluation case without true tags");
  const std::size_t n = std::min(kMaxCutoff, c.predicted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (is_true(c, c.predicted[i].tag)) sum += 1.0 / static_cast<double>(i + 1);
  return sum / static_cast<double>(c.true_tags.size());
}

double average_precision(const EvalCase& c) {
  if (c.true_tags.empty()) throw ConfigError("evaluation case without true tags");
  const std::size_t n = std::min(kMaxCutoff, c.predicted.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_true(c, c.predicted[i].tag)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(c.true_tags.size());
}

AlgorithmMetrics aggregate(std::string name, std::span<const EvalCase> cases, PrecisionMode mode) {
  AlgorithmMetrics m;
  m.name = std::move(name);
  m.n_cases = cases.size();
  for (const auto& c : cases) {
    for (std::size_t k = 1; k <= kMaxCutoff; ++k) {
      const auto pr = precision_recall_at_k(c, k, mode);
      m.precision[k - 1] += pr.precision;
      m.recall[k - 1] += pr.recall;
    }
    m.case_f1.push_back(f1_at_5(c, mode));
    m.case_mrr.push_back(reciprocal_rank(c));
    m.case_map.push_back(average_precision(c));
    m.f1_at_5 += m.case_f1.back();
    m.mrr += m.case_mrr.back();
    m.map += m.case_map.back();
  }
  if (!cases.empty()) {
    const double n = static_cast<double>(cases.size());
    for (auto& v : m.precision) v /= n;
    for (auto& v : m.recall) v /= n;
    m.f1_at_5 /= n;
    m.mrr /= n;
    m.map /= n;
  }
  return m;
}

EvalReport evaluate(std::span<const NamedRecommender> algorithms, std::span<const Post> test,
                    const EvalOptions& options) {
  EvalReport report;
  std::size_t workers = options.workers == 0 ? std::thread::hardware_concurrency() : options.workers;
  workers = std::max<std::size_t>(1, std::min(workers, test.size()));

  for (const auto& algo : algorithms) {
    std::vector<EvalCase> cases(test.size());
    std::vector<char> failed(test.size(), 0);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < test.size(); i = next++) {
        const Post& p = test[i];
        cases[i].user = p.user;
        cases[i].resource = p.resource;
        cases[i].true_tags = p.tags;
        try {
          auto predicted = algo.run(p);
          if (predicted.size() > kMaxCutoff) predicted.resize(kMaxCutoff);
          cases[i].predicted = std::move(predicted);
        } catch (const std::exception&) {
          failed[i] = 1;
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    auto metrics = aggregate(algo.name, cases, options.precision_mode);
    metrics.n_failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    report.algorithms.push_back(std::move(metrics));
  }

  if (options.significance) {
    const auto& algos = report.algorithms;
    for (std::size_t a = 0; a < algos.size(); ++a) {
      for (std::size_t b = a + 1; b < algos.size(); ++b) {
        if (algos[a].n_cases == 0 || algos[b].n_cases == 0) continue;
        report.significance.push_back(
            {algos[a].name, algos[b].name, "f1@5",
             wilcoxon_rank_sum(algos[a].case_f1, algos[b].case_f1)});
        report.significance.push_back({algos[a].name, algos[b].name, "mrr",
                                       wilcoxon_rank_sum(algos[a].case_mrr, algos[b].case_mrr)});
        report.significance.push_back({algos[a].name, algos[b].name, "map",
                                       wilcoxon_rank_sum(algos[a].case_map, algos[b].case_map)});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json(report.metadata);
  auto& algos = j["algorithms"] = nlohmann::ordered_json::array();
  for (const auto& m : report.algorithms) {
    nlohmann::ordered_json a;
    a["name"] = m.name;
    a["n_cases"] = m.n_cases;
    a["n_failures"] = m.n_failures;
    a["f1@5"] = m.f1_at_5;
    a["mrr"] = m.mrr;
    a["map"] = m.map;
    a["precision@k"] = m.precision;
    a["recall@k"] = m.recall;
    algos.push_back(std::move(a));
  }
  auto& sig = j["significance"] = nlohmann::ordered_json::array();
  for (const auto& s : report.significance) {
    sig.push_back({{"first", s.first}, {"second", s.second}, {"metric", s.metric},
                   {"p_value", s.p_value}});
  }
  out << j.dump(2) << '\n';
}

void write_report_tsv(std::ostream& out, const EvalReport& report) {
  for (const auto& [key, value] : report.metadata) out << "# " << key << ": " << value << '\n';
  out << "algorithm\tn_cases\tn_failures\tf1@5\tmrr\tmap\tp@5\tr@5\tp@10\tr@10\n";
  for (const auto& m : report.algorithms) {
    out << m.name << '\t' << m.n_cases << '\t' << m.n_failures << '\t' << fmt(m.f1_at_5) << '\t'
        << fmt(m.mrr) << '\t' << fmt(m.map) << '\t' << fmt(m.precision[4]) << '\t'
        << fmt(m.recall[4]) << '\t' << fmt(m.precision[9]) << '\t' << fmt(m.recall[9]) << '\n';
  }
  if (!report.significance.empty()) {
    out << "\nfirst\tsecond\tmetric\tp_value\n";
    for (const auto& s : report.significance)
      out << s.first << '\t' << s.second << '\t' << s.metric << '\t' << fmt(s.p_value) << '\n';
  }
}

void write_curves_tsv(std::ostream& out, const EvalReport& report) {
  for (const auto& [key, value] : report.metadata) out << "# " << key << ": " << value << '\n';
  out << "algorithm\tk\trecall\tprecision\n";
  for (const auto& m : report.algorithms)
    for (std::size_t k = 1; k <= kMaxCutoff; ++k)
      out << m.name << '\t' << k << '\t' << fmt(m.recall[k - 1]) << '\t'
          << fmt(m.precision[k - 1]) << '\n';
}

void write_drift_tsv(std::ostream& out, std::span<const DriftRow> rows,
                     const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "lag_kind\tlag\tmean_gist_sim\tmean_verbatim_sim\tn_users\n";
  for (const auto& r : rows)
    out << (r.kind == LagKind::bookmarks ? "bookmarks" : "days") << '\t' << r.lag << '\t'
        << fmt(r.mean_gist) << '\t' << fmt(r.mean_verbatim) << '\t' << r.n_users << '\n';
}

}  // namespace tagrec
