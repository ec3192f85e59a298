#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbr/corpus.hpp"
#include "sbr/errors.hpp"
#include "sbr/execution.hpp"
#include "sbr/features.hpp"
#include "sbr/learners.hpp"
#include "sbr/textprep.hpp"

namespace sbr {

// Positive class is security.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Throws DimensionError on length mismatch or empty input.
ConfusionMatrix compute_confusion(std::span<const Label> predicted, std::span<const Label> truth);

// Undefined ratios (zero denominators) are reported as 0.
// Throws DataError when the matrix is empty.
Metrics compute_metrics(const ConfusionMatrix& cm);

struct ExperimentSpec {
  ContentVariant content = ContentVariant::title_plus_description;
  FeatureScheme scheme = FeatureScheme::tfidf;
  AlgorithmSpec algorithm;
  std::size_t vector_size = 1000;
  int k = 5;
  std::uint64_t seed = 0;
  RankingPolicy policy = RankingPolicy::document_frequency;

  // Throws ConfigError unless vector_size >= 1 and k >= 2.
  void validate() const;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<Metrics> per_fold;
  Metrics mean;
  double wall_seconds = 0.0;
  // set when the cell failed inside a grid run
  std::optional<std::string> error;

  bool ok() const noexcept { return !error.has_value(); }
};

// Raised by cross_validate when a fold fails; carries the fold index.
class FoldError : public DataError {
 public:
  FoldError(int fold, const std::string& what)
      : DataError("fold " + std::to_string(fold) + ": " + what), fold_(fold) {}
  int fold() const noexcept { return fold_; }

 private:
  int fold_;
};

// Features of one fold. The vocabulary and IDF weights come from the
// training documents only and are then applied to the held-out ones.
struct FoldFeatures {
  Vocabulary vocab;
  LabeledDataset train;
  Matrix test;
  std::vector<int> test_labels;
};

FoldFeatures featurize_fold(std::span<const TokenSequence> docs, std::span<const int> labels,
                            const FoldAssignment& folds, int fold, const ExperimentSpec& spec,
                            Execution exec = Execution::parallel);

std::vector<int> label_vector(const Corpus& corpus);

// Stratified k-fold CV with per-fold refitting of vocabulary, IDF and
// model. Fold models use seeds derived from (algorithm seed, fold).
ExperimentResult cross_validate(const Corpus& corpus, const ExperimentSpec& spec,
                                const Stoplist& stoplist = default_stoplist(),
                                Execution exec = Execution::parallel);

// Same as above on already preprocessed documents.
ExperimentResult cross_validate(std::span<const TokenSequence> docs, std::span<const int> labels,
                                const FoldAssignment& folds, const ExperimentSpec& spec,
                                Execution exec = Execution::parallel);

struct GridOptions {
  std::size_t vector_size = 1000;
  int k = 5;
  std::uint64_t seed = 0;
  RankingPolicy policy = RankingPolicy::document_frequency;
  // number of cells evaluated concurrently; 1 = serial
  int jobs = 1;
};

// One result per (content, scheme, algorithm) cell in that nesting order.
// Each algorithm's seed is replaced by options.seed. Failing cells carry
// an error instead of aborting the grid.
std::vector<ExperimentResult> run_grid(const Corpus& corpus, std::span<const ContentVariant> contents,
                                       std::span<const FeatureScheme> schemes,
                                       std::span<const AlgorithmSpec> algorithms,
                                       const GridOptions& options,
                                       const Stoplist& stoplist = default_stoplist());

struct SweepPoint {
  std::size_t size = 0;
  std::optional<double> f_score;  // empty when that size failed
  std::optional<std::string> error;
};

// Cross-validates `base` once per vocabulary size. Sizes must be
// non-empty, ascending and >= 1 (ConfigError otherwise).
std::vector<SweepPoint> sweep_vector_size(const Corpus& corpus, const ExperimentSpec& base,
                                          std::span<const std::size_t> sizes,
                                          const Stoplist& stoplist = default_stoplist());

// --- reports ----------------------------------------------------------------

enum class ReportFormat { csv, markdown };

// Fixed-point with six decimals.
std::string format_metric(double value);

// Columns: content, scheme, algorithm, vector_size, k, seed, accuracy,
// precision, recall, f_score, wall_time_s. Failed cells leave the metric
// fields empty; wall_time_s is left empty unless include_timing is set, so
// reruns with the same seed are byte-identical.
void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results,
                       bool include_timing = false);
// One table per content variant: learners as rows, schemes as column
// groups; failed cells are listed in a trailing section.
void write_results_markdown(std::ostream& out, std::span<const ExperimentResult> results);
// Throws DataError on empty results and IoError on unwritable paths.
void emit_report(std::span<const ExperimentResult> results, ReportFormat format,
                 const std::filesystem::path& path, bool include_timing = false);

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);

}  // namespace sbr
