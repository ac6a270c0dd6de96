#include <benchmark/benchmark.h>

#include <memory>

#include "tagrec/baselines.hpp"
#include "tagrec/recommenders.hpp"
#include "tagrec/synthetic.hpp"
#include "tagrec/topics.hpp"

using namespace tagrec;

namespace {

struct Corpus {
  Folksonomy data;
  DatasetSplit split;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    const auto raw = generate_drift_corpus({});
    auto vocab = std::make_shared<Vocabularies>();
    Folksonomy f(vocab, intern_posts(raw, *vocab));
    auto split = leave_one_out_split(f);
    return Corpus{std::move(f), std::move(split)};
  }();
  return c;
}

LdaConfig lda_config(std::size_t topics) {
  LdaConfig cfg;
  cfg.num_topics = topics;
  cfg.iterations = 100;
  cfg.seed = 3;
  return cfg;
}

void BM_GibbsSweep(benchmark::State& state) {
  GibbsSampler sampler(corpus().data, lda_config(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) sampler.sweep();
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(corpus().data.stats().assignments));
}
BENCHMARK(BM_GibbsSweep)->Arg(20)->Arg(100);

void BM_FoldIn(benchmark::State& state) {
  const auto model = train_lda(corpus().split.train, lda_config(20));
  const auto& post = corpus().split.test.front();
  for (auto _ : state) benchmark::DoNotOptimize(model.infer(post.tags));
}
BENCHMARK(BM_FoldIn);

void BM_Recommend(benchmark::State& state) {
  const auto algo = static_cast<Algorithm>(state.range(0));
  const auto& split = corpus().split;
  const auto model = train_lda(split.train, lda_config(20));
  const Algorithm algos[] = {algo};
  const RecommenderSuite suite(split.train, &model, {}, algos);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(suite.recommend(algo, split.test[i]));
    i = (i + 1) % split.test.size();
  }
  state.SetLabel(std::string(algorithm_name(algo)));
}
BENCHMARK(BM_Recommend)
    ->Arg(static_cast<int>(Algorithm::three_layers))
    ->Arg(static_cast<int>(Algorithm::three_layers_tag))
    ->Arg(static_cast<int>(Algorithm::bllc))
    ->Arg(static_cast<int>(Algorithm::cf))
    ->Arg(static_cast<int>(Algorithm::folkrank));

void BM_PageRank(benchmark::State& state) {
  const auto& train = corpus().split.train;
  const auto graph = FolkGraph::from_folksonomy(train);
  const auto& post = corpus().split.test.front();
  const auto pref = query_preference(graph, post.user, post.resource);
  for (auto _ : state) benchmark::DoNotOptimize(pagerank_rank(graph, pref));
  state.counters["nodes"] = static_cast<double>(graph.num_nodes());
}
BENCHMARK(BM_PageRank);

}  // namespace
BENCHMARK_MAIN();
