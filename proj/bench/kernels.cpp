// Serial reference vs OpenMP path for each parallel kernel. The second
// benchmark argument selects the path: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "sbr/features.hpp"
#include "sbr/learners.hpp"
#include "sbr/synthetic.hpp"
#include "sbr/textprep.hpp"

using namespace sbr;

namespace {

Execution path(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

Corpus corpus_of(std::size_t reports) {
  auto options = lexicon_preset(7);
  options.reports = reports;
  return generate_synthetic_corpus(options);
}

LabeledDataset dataset_of(std::size_t reports, std::size_t vector_size) {
  const auto corpus = corpus_of(reports);
  const auto docs = preprocess_corpus(corpus, ContentVariant::title_plus_description);
  const auto vocab = build_vocabulary(docs, vector_size);
  std::vector<int> labels;
  for (const auto& r : corpus.reports()) labels.push_back(r.label == Label::security ? 1 : 0);
  return {vectorize_corpus(docs, vocab, FeatureScheme::tfidf), std::move(labels), FeatureScheme::tfidf};
}

void BM_Preprocess(benchmark::State& state) {
  const auto corpus = corpus_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        preprocess_corpus(corpus, ContentVariant::title_plus_description, default_stoplist(), path(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Vectorize(benchmark::State& state) {
  const auto corpus = corpus_of(static_cast<std::size_t>(state.range(0)));
  const auto docs = preprocess_corpus(corpus, ContentVariant::title_plus_description);
  const auto vocab = build_vocabulary(docs, 500);
  for (auto _ : state) benchmark::DoNotOptimize(vectorize_corpus(docs, vocab, FeatureScheme::tfidf, path(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KnnPredict(benchmark::State& state) {
  const auto data = dataset_of(static_cast<std::size_t>(state.range(0)), 200);
  const auto model = train(AlgorithmSpec::defaults(AlgorithmKind::knn), data, Execution::serial);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_batch(data.features, path(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForestTrain(benchmark::State& state) {
  const auto data = dataset_of(static_cast<std::size_t>(state.range(0)), 100);
  auto spec = AlgorithmSpec::defaults(AlgorithmKind::random_forest, 3);
  spec.params.n_estimators = 20;
  for (auto _ : state) benchmark::DoNotOptimize(train(spec, data, path(state)));
}

}  // namespace

BENCHMARK(BM_Preprocess)->ArgsProduct({{1000, 4000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Vectorize)->ArgsProduct({{1000, 4000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnPredict)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestTrain)->ArgsProduct({{500, 1000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
