#include "sbr/eval.hpp"

#include <chrono>
#include <exception>

#include "sbr/random.hpp"

namespace sbr {

ConfusionMatrix compute_confusion(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size())
    throw DimensionError("prediction and truth lengths differ: " + std::to_string(predicted.size()) +
                         " vs " + std::to_string(truth.size()));
  if (truth.empty()) throw DimensionError("cannot score an empty prediction list");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == Label::security;
    const bool t = truth[i] == Label::security;
    if (p && t) ++cm.tp;
    else if (p) ++cm.fp;
    else if (t) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("empty confusion matrix");
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics m;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  const double pr = m.precision + m.recall;
  m.f_score = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
  return m;
}

void ExperimentSpec::validate() const {
  if (vector_size < 1) throw ConfigError("vector size must be at least 1");
  if (k < 2) throw ConfigError("fold count must be at least 2, got " + std::to_string(k));
  algorithm.validate();
}

std::vector<int> label_vector(const Corpus& corpus) {
  std::vector<int> labels;
  labels.reserve(corpus.size());
  for (const auto& r : corpus.reports()) labels.push_back(r.label == Label::security ? 1 : 0);
  return labels;
}

FoldFeatures featurize_fold(std::span<const TokenSequence> docs, std::span<const int> labels,
                            const FoldAssignment& folds, int fold, const ExperimentSpec& spec,
                            Execution exec) {
  if (docs.size() != labels.size() || docs.size() != folds.fold_of.size())
    throw DimensionError("documents, labels and fold assignment differ in length");
  const auto train_idx = folds.train_indices(fold);
  const auto test_idx = folds.test_indices(fold);

  std::vector<TokenSequence> train_docs, test_docs;
  std::vector<int> train_labels, test_labels;
  for (auto i : train_idx) {
    train_docs.push_back(docs[i]);
    train_labels.push_back(labels[i]);
  }
  for (auto i : test_idx) {
    test_docs.push_back(docs[i]);
    test_labels.push_back(labels[i]);
  }

  Vocabulary vocab = build_vocabulary(train_docs, spec.vector_size, spec.policy);
  Matrix train_x = vectorize_corpus(train_docs, vocab, spec.scheme, exec);
  Matrix test_x = vectorize_corpus(test_docs, vocab, spec.scheme, exec);
  return FoldFeatures{std::move(vocab),
                      LabeledDataset{std::move(train_x), std::move(train_labels), spec.scheme},
                      std::move(test_x), std::move(test_labels)};
}

namespace {

Metrics mean_of(const std::vector<Metrics>& per_fold) {
  Metrics m;
  for (const auto& f : per_fold) {
    m.accuracy += f.accuracy;
    m.precision += f.precision;
    m.recall += f.recall;
    m.f_score += f.f_score;
  }
  const auto n = static_cast<double>(per_fold.size());
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.f_score /= n;
  return m;
}

Metrics run_fold(std::span<const TokenSequence> docs, std::span<const int> labels,
                 const FoldAssignment& folds, int fold, const ExperimentSpec& spec, Execution exec) {
  const FoldFeatures ff = featurize_fold(docs, labels, folds, fold, spec, exec);
  AlgorithmSpec algo = spec.algorithm;
  algo.seed = derive_seed(spec.algorithm.seed, static_cast<std::uint64_t>(fold));
  const Model model = train(algo, ff.train, exec);
  const auto predictions = model.predict_batch(ff.test, exec);
  std::vector<Label> predicted, truth;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    predicted.push_back(predictions[i].label);
    truth.push_back(ff.test_labels[i] == 1 ? Label::security : Label::non_security);
  }
  return compute_metrics(compute_confusion(predicted, truth));
}

}  // namespace

ExperimentResult cross_validate(std::span<const TokenSequence> docs, std::span<const int> labels,
                                const FoldAssignment& folds, const ExperimentSpec& spec,
                                Execution exec) {
  spec.validate();
  if (folds.k != spec.k)
    throw ConfigError("fold assignment has k=" + std::to_string(folds.k) + ", experiment wants " +
                      std::to_string(spec.k));
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.spec = spec;
  for (int f = 0; f < spec.k; ++f) {
    try {
      result.per_fold.push_back(run_fold(docs, labels, folds, f, spec, exec));
    } catch (const std::exception& e) {
      throw FoldError(f, e.what());
    }
  }
  result.mean = mean_of(result.per_fold);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentResult cross_validate(const Corpus& corpus, const ExperimentSpec& spec,
                                const Stoplist& stoplist, Execution exec) {
  spec.validate();
  const auto folds = stratified_kfold(corpus, spec.k, spec.seed);
  const auto docs = preprocess_corpus(corpus, spec.content, stoplist, exec);
  const auto labels = label_vector(corpus);
  return cross_validate(docs, labels, folds, spec, exec);
}

std::vector<ExperimentResult> run_grid(const Corpus& corpus, std::span<const ContentVariant> contents,
                                       std::span<const FeatureScheme> schemes,
                                       std::span<const AlgorithmSpec> algorithms,
                                       const GridOptions& options, const Stoplist& stoplist) {
  if (contents.empty() || schemes.empty() || algorithms.empty())
    throw ConfigError("grid needs at least one content variant, scheme and algorithm");
  if (options.jobs < 1) throw ConfigError("jobs must be at least 1");

  std::vector<ExperimentResult> cells;
  for (auto c : contents)
    for (auto s : schemes)
      for (const auto& a : algorithms) {
        ExperimentResult r;
        r.spec.content = c;
        r.spec.scheme = s;
        r.spec.algorithm = a;
        r.spec.algorithm.seed = options.seed;
        r.spec.vector_size = options.vector_size;
        r.spec.k = options.k;
        r.spec.seed = options.seed;
        r.spec.policy = options.policy;
        cells.push_back(std::move(r));
      }
  for (const auto& cell : cells) cell.spec.validate();

  // A stratification failure affects every cell; record it on each.
  FoldAssignment folds;
  try {
    folds = stratified_kfold(corpus, options.k, options.seed);
  } catch (const DataError& e) {
    for (auto& cell : cells) cell.error = e.what();
    return cells;
  }
  const auto labels = label_vector(corpus);
  std::vector<std::vector<TokenSequence>> docs_by_content;
  for (auto c : contents) docs_by_content.push_back(preprocess_corpus(corpus, c, stoplist));

  const std::size_t per_content = schemes.size() * algorithms.size();
  const Execution inner = options.jobs > 1 ? Execution::serial : Execution::parallel;
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.jobs) if (options.jobs > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& cell = cells[static_cast<std::size_t>(i)];
    const auto& docs = docs_by_content[static_cast<std::size_t>(i) / per_content];
    try {
      cell = cross_validate(docs, labels, folds, cell.spec, inner);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }
  return cells;
}

std::vector<SweepPoint> sweep_vector_size(const Corpus& corpus, const ExperimentSpec& base,
                                          std::span<const std::size_t> sizes,
                                          const Stoplist& stoplist) {
  if (sizes.empty()) throw ConfigError("sweep needs at least one vector size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ConfigError("vector sizes must be at least 1");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw ConfigError("vector sizes must be ascending");
  }
  base.validate();
  const auto folds = stratified_kfold(corpus, base.k, base.seed);
  const auto docs = preprocess_corpus(corpus, base.content, stoplist);
  const auto labels = label_vector(corpus);

  std::vector<SweepPoint> points;
  for (auto size : sizes) {
    ExperimentSpec spec = base;
    spec.vector_size = size;
    SweepPoint p;
    p.size = size;
    try {
      p.f_score = cross_validate(docs, labels, folds, spec).mean.f_score;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace sbr
