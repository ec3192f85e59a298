#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sbr/corpus.hpp"
#include "sbr/execution.hpp"
#include "sbr/features.hpp"
#include "sbr/matrix.hpp"
#include "sbr/tree.hpp"

namespace sbr {

enum class AlgorithmKind {
  gnb,
  knn,
  linear_sgd,
  decision_tree,
  bagged_trees,
  random_forest,
  extra_trees,
  adaboost,
  gradient_boosting,
};

inline constexpr std::array<AlgorithmKind, 9> kAllAlgorithms{
    AlgorithmKind::gnb,           AlgorithmKind::knn,          AlgorithmKind::linear_sgd,
    AlgorithmKind::decision_tree, AlgorithmKind::bagged_trees, AlgorithmKind::random_forest,
    AlgorithmKind::extra_trees,   AlgorithmKind::adaboost,     AlgorithmKind::gradient_boosting,
};

std::string_view to_string(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm(std::string_view text);
bool is_tree_kind(AlgorithmKind kind);

enum class SgdLoss { hinge, logistic };
enum class FeatureSubset { all, sqrt };

// Flat record of every tunable; each kind reads only its own fields.
struct Hyperparameters {
  double var_smoothing = 1e-9;         // gnb: floor = var_smoothing * max feature variance
  int neighbors = 5;                   // knn
  SgdLoss loss = SgdLoss::hinge;       // linear-sgd
  double learning_rate = 0.01;         // linear-sgd step; boosting shrinkage
  int epochs = 50;                     // linear-sgd
  double l2 = 1e-4;                    // linear-sgd
  int n_estimators = 100;              // ensembles
  int max_depth = 0;                   // trees, 0 = unlimited
  int min_samples_leaf = 1;            // trees
  FeatureSubset max_features = FeatureSubset::all;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::decision_tree;
  Hyperparameters params;
  std::uint64_t seed = 0;

  // Documented defaults for the kind.
  static AlgorithmSpec defaults(AlgorithmKind kind, std::uint64_t seed = 0);
  // Throws ConfigError on out-of-range values.
  void validate() const;
  // Applies a "name = value" override, e.g. ("neighbors", "3").
  // Throws ConfigError on unknown names or bad values.
  void set(std::string_view name, std::string_view value);

  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

// Labels are 1 = security, 0 = non-security.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  FeatureScheme scheme = FeatureScheme::tf;

  // Throws DimensionError / DegenerateTrainingError.
  void validate_for_training() const;
};

struct GnbState {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;
};

struct KnnState {
  Matrix points;
  std::vector<int> labels;
};

struct LinearState {
  std::vector<double> weights;
  double bias = 0.0;
};

// Bagged trees, random forest, extra trees: mean of leaf P(security).
struct ForestState {
  std::vector<Tree> trees;
};

// SAMME over stumps; each stump leaf votes security when its value > 0.5.
struct AdaBoostState {
  std::vector<Tree> stumps;
  std::vector<double> alphas;
};

// Log-loss boosting: F(x) = init + shrinkage * sum of tree outputs.
struct BoostingState {
  double init = 0.0;
  double shrinkage = 0.1;
  std::vector<Tree> trees;
};

using ModelState =
    std::variant<GnbState, KnnState, LinearState, Tree, ForestState, AdaBoostState, BoostingState>;

struct TrainingMeta {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double wall_seconds = 0.0;
};

struct Prediction {
  Label label = Label::non_security;
  // higher = more security-like: P(security) for gnb, knn, trees, forests
  // and gradient boosting; the margin w.x + b for linear-sgd; the
  // normalized weighted vote in [-1, 1] for adaboost
  double score = 0.0;
};

class Model {
 public:
  Model(AlgorithmSpec spec, ModelState state, TrainingMeta meta)
      : spec_(std::move(spec)), state_(std::move(state)), meta_(meta) {}

  const AlgorithmSpec& spec() const noexcept { return spec_; }
  const ModelState& state() const noexcept { return state_; }
  const TrainingMeta& meta() const noexcept { return meta_; }

  // Throws DimensionError unless x.size() == meta().cols.
  Prediction predict(std::span<const double> x) const;
  // Class probabilities {P(non-security), P(security)}. Margin-based kinds
  // map their score through the logistic function (linear-sgd) or
  // (1 + vote) / 2 (adaboost).
  std::array<double, 2> predict_proba(std::span<const double> x) const;
  std::vector<Prediction> predict_batch(const Matrix& rows, Execution exec = Execution::parallel) const;

 private:
  AlgorithmSpec spec_;
  ModelState state_;
  TrainingMeta meta_;
};

// Deterministic given spec.seed. Ensemble members draw from streams
// derived from (seed, member index), so serial and parallel execution
// produce identical models.
Model train(const AlgorithmSpec& spec, const LabeledDataset& data,
            Execution exec = Execution::parallel);

// --- persistence ------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const Model& model);
// Throws VersionError on a format version other than kModelFormatVersion.
Model model_from_json(std::string_view text);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace sbr
