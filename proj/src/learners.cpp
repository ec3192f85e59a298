#include "sbr/learners.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>

#include "sbr/errors.hpp"
#include "sbr/random.hpp"

namespace sbr {

namespace {

constexpr std::array<std::pair<AlgorithmKind, std::string_view>, 9> kAlgorithmNames{{
    {AlgorithmKind::gnb, "gnb"},
    {AlgorithmKind::knn, "knn"},
    {AlgorithmKind::linear_sgd, "linear-sgd"},
    {AlgorithmKind::decision_tree, "decision-tree"},
    {AlgorithmKind::bagged_trees, "bagged-trees"},
    {AlgorithmKind::random_forest, "random-forest"},
    {AlgorithmKind::extra_trees, "extra-trees"},
    {AlgorithmKind::adaboost, "adaboost"},
    {AlgorithmKind::gradient_boosting, "gradient-boosting"},
}};

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
T parse_number(std::string_view name, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("hyperparameter '" + std::string(name) + "': cannot parse '" +
                      std::string(text) + "'");
  return value;
}

}  // namespace

std::string_view to_string(AlgorithmKind kind) {
  for (const auto& [k, name] : kAlgorithmNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm(std::string_view text) {
  for (const auto& [k, name] : kAlgorithmNames)
    if (name == text) return k;
  return std::nullopt;
}

bool is_tree_kind(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::decision_tree:
    case AlgorithmKind::bagged_trees:
    case AlgorithmKind::random_forest:
    case AlgorithmKind::extra_trees:
    case AlgorithmKind::adaboost:
    case AlgorithmKind::gradient_boosting: return true;
    default: return false;
  }
}

AlgorithmSpec AlgorithmSpec::defaults(AlgorithmKind kind, std::uint64_t seed) {
  AlgorithmSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  auto& p = spec.params;
  switch (kind) {
    case AlgorithmKind::random_forest:
    case AlgorithmKind::extra_trees:
      p.max_features = FeatureSubset::sqrt;
      break;
    case AlgorithmKind::adaboost:
      p.n_estimators = 50;
      p.max_depth = 1;
      p.learning_rate = 1.0;
      break;
    case AlgorithmKind::gradient_boosting:
      p.n_estimators = 100;
      p.max_depth = 3;
      p.learning_rate = 0.1;
      break;
    default: break;
  }
  return spec;
}

void AlgorithmSpec::validate() const {
  const auto& p = params;
  auto fail = [](const std::string& what) { throw ConfigError("hyperparameter " + what); };
  if (!(p.var_smoothing >= 0.0)) fail("var_smoothing must be >= 0");
  if (p.neighbors < 1) fail("neighbors must be >= 1");
  if (!(p.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (p.epochs < 1) fail("epochs must be >= 1");
  if (!(p.l2 >= 0.0)) fail("l2 must be >= 0");
  if (p.n_estimators < 1) fail("n_estimators must be >= 1");
  if (p.max_depth < 0) fail("max_depth must be >= 0");
  if (p.min_samples_leaf < 1) fail("min_samples_leaf must be >= 1");
}

void AlgorithmSpec::set(std::string_view name, std::string_view value) {
  auto& p = params;
  if (name == "var_smoothing") {
    p.var_smoothing = parse_number<double>(name, value);
  } else if (name == "neighbors") {
    p.neighbors = parse_number<int>(name, value);
  } else if (name == "loss") {
    if (value == "hinge") p.loss = SgdLoss::hinge;
    else if (value == "logistic" || value == "log") p.loss = SgdLoss::logistic;
    else throw ConfigError("hyperparameter 'loss': expected hinge or logistic");
  } else if (name == "learning_rate") {
    p.learning_rate = parse_number<double>(name, value);
  } else if (name == "epochs") {
    p.epochs = parse_number<int>(name, value);
  } else if (name == "l2") {
    p.l2 = parse_number<double>(name, value);
  } else if (name == "n_estimators") {
    p.n_estimators = parse_number<int>(name, value);
  } else if (name == "max_depth") {
    p.max_depth = parse_number<int>(name, value);
  } else if (name == "min_samples_leaf") {
    p.min_samples_leaf = parse_number<int>(name, value);
  } else if (name == "max_features") {
    if (value == "all") p.max_features = FeatureSubset::all;
    else if (value == "sqrt") p.max_features = FeatureSubset::sqrt;
    else throw ConfigError("hyperparameter 'max_features': expected all or sqrt");
  } else {
    throw ConfigError("unknown hyperparameter '" + std::string(name) + "'");
  }
  validate();
}

void LabeledDataset::validate_for_training() const {
  if (features.rows() != labels.size())
    throw DimensionError("feature rows (" + std::to_string(features.rows()) + ") and labels (" +
                         std::to_string(labels.size()) + ") differ");
  if (features.cols() == 0) throw DimensionError("training data has zero feature columns");
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1])
    throw DegenerateTrainingError("training data contains a single class");
}

// --- training ---------------------------------------------------------------

namespace {

GnbState train_gnb(const AlgorithmSpec& spec, const LabeledDataset& data) {
  const auto& x = data.features;
  const std::size_t n = x.rows(), d = x.cols();
  GnbState s;
  std::array<std::size_t, 2> count{};
  for (int c = 0; c < 2; ++c) {
    s.mean[c].assign(d, 0.0);
    s.variance[c].assign(d, 0.0);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const int c = data.labels[r];
    ++count[c];
    auto row = x.row(r);
    for (std::size_t j = 0; j < d; ++j) s.mean[c][j] += row[j];
  }
  for (int c = 0; c < 2; ++c)
    for (double& m : s.mean[c]) m /= static_cast<double>(count[c]);
  for (std::size_t r = 0; r < n; ++r) {
    const int c = data.labels[r];
    auto row = x.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = row[j] - s.mean[c][j];
      s.variance[c][j] += dev * dev;
    }
  }
  for (int c = 0; c < 2; ++c)
    for (double& v : s.variance[c]) v /= static_cast<double>(count[c]);

  // floor proportional to the largest per-feature variance over all rows
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, j);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) sq += (x(r, j) - mean) * (x(r, j) - mean);
    max_var = std::max(max_var, sq / static_cast<double>(n));
  }
  double epsilon = spec.params.var_smoothing * max_var;
  if (!(epsilon > 0.0)) epsilon = spec.params.var_smoothing > 0.0 ? spec.params.var_smoothing : 1e-9;
  for (int c = 0; c < 2; ++c)
    for (double& v : s.variance[c]) v += epsilon;
  for (int c = 0; c < 2; ++c)
    s.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));
  return s;
}

LinearState train_linear(const AlgorithmSpec& spec, const LabeledDataset& data) {
  const auto& p = spec.params;
  const std::size_t n = data.features.rows(), d = data.features.cols();
  LinearState s;
  s.weights.assign(d, 0.0);
  std::vector<std::size_t> order(n);
  Rng rng(spec.seed);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t r : order) {
      auto x = data.features.row(r);
      const double y = data.labels[r] == 1 ? 1.0 : -1.0;
      const double margin = dot(s.weights, x) + s.bias;
      double g;  // d loss / d margin
      if (p.loss == SgdLoss::hinge) {
        g = y * margin < 1.0 ? -y : 0.0;
      } else {
        g = -y * sigmoid(-y * margin);
      }
      const double decay = 1.0 - p.learning_rate * p.l2;
      for (std::size_t j = 0; j < d; ++j) s.weights[j] = s.weights[j] * decay - p.learning_rate * g * x[j];
      s.bias -= p.learning_rate * g;
    }
  }
  return s;
}

TreeOptions tree_options(const AlgorithmSpec& spec, std::size_t n_features, SplitStrategy strategy) {
  TreeOptions o;
  o.max_depth = spec.params.max_depth;
  o.min_samples_leaf = spec.params.min_samples_leaf;
  o.strategy = strategy;
  if (spec.params.max_features == FeatureSubset::sqrt)
    o.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
  return o;
}

ForestState train_forest(const AlgorithmSpec& spec, const LabeledDataset& data,
                         const Matrix& columns, Execution exec) {
  const bool bootstrap = spec.kind != AlgorithmKind::extra_trees;
  const auto strategy =
      spec.kind == AlgorithmKind::extra_trees ? SplitStrategy::random : SplitStrategy::best;
  const auto options = tree_options(spec, columns.rows(), strategy);
  const std::size_t n = data.labels.size();
  const int members = spec.params.n_estimators;

  ForestState s;
  s.trees.resize(members);
  auto grow_member = [&](int m) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(m)));
    std::vector<double> weights(n, bootstrap ? 0.0 : 1.0);
    if (bootstrap)
      for (std::size_t i = 0; i < n; ++i) weights[rng.below(n)] += 1.0;
    s.trees[m] = grow_classification_tree(columns, data.labels, weights, options, rng);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int m = 0; m < members; ++m) grow_member(m);
  } else {
    for (int m = 0; m < members; ++m) grow_member(m);
  }
  return s;
}

int stump_vote(const Tree& stump, std::span<const double> x) {
  return stump.evaluate(x) > 0.5 ? 1 : -1;
}

AdaBoostState train_adaboost(const AlgorithmSpec& spec, const LabeledDataset& data,
                             const Matrix& columns) {
  const std::size_t n = data.labels.size();
  auto options = tree_options(spec, columns.rows(), SplitStrategy::best);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  Rng rng(spec.seed);
  AdaBoostState s;
  for (int round = 0; round < spec.params.n_estimators; ++round) {
    Tree stump = grow_classification_tree(columns, data.labels, w, options, rng);
    std::vector<char> miss(n);
    double err = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = data.labels[i] == 1 ? 1 : -1;
      miss[i] = stump_vote(stump, data.features.row(i)) != y;
      if (miss[i]) err += w[i];
      total += w[i];
    }
    err /= total;
    if (err <= 0.0) {
      // perfect learner: keep it and stop
      s.stumps.push_back(std::move(stump));
      s.alphas.push_back(1.0);
      break;
    }
    if (err >= 0.5) {
      // no better than chance; only kept when the ensemble is still empty
      if (s.stumps.empty()) {
        s.stumps.push_back(std::move(stump));
        s.alphas.push_back(1.0);
      }
      break;
    }
    const double alpha = spec.params.learning_rate * std::log((1.0 - err) / err);
    s.stumps.push_back(std::move(stump));
    s.alphas.push_back(alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
  }
  return s;
}

BoostingState train_boosting(const AlgorithmSpec& spec, const LabeledDataset& data,
                             const Matrix& columns) {
  const std::size_t n = data.labels.size();
  const double pos = static_cast<double>(std::count(data.labels.begin(), data.labels.end(), 1));
  const double prior = pos / static_cast<double>(n);

  BoostingState s;
  s.init = std::log(prior / (1.0 - prior));
  s.shrinkage = spec.params.learning_rate;
  const auto options = tree_options(spec, columns.rows(), SplitStrategy::best);
  Rng rng(spec.seed);

  std::vector<double> f(n, s.init), residual(n), hessian(n);
  for (int m = 0; m < spec.params.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(f[i]);
      residual[i] = static_cast<double>(data.labels[i]) - p;
      hessian[i] = p * (1.0 - p);
    }
    Tree tree = grow_regression_tree(columns, residual, hessian, options, rng);
    for (std::size_t i = 0; i < n; ++i) f[i] += s.shrinkage * tree.evaluate(data.features.row(i));
    s.trees.push_back(std::move(tree));
  }
  return s;
}

}  // namespace

Model train(const AlgorithmSpec& spec, const LabeledDataset& data, Execution exec) {
  spec.validate();
  data.validate_for_training();
  const auto started = std::chrono::steady_clock::now();

  auto state = [&]() -> ModelState {
    switch (spec.kind) {
      case AlgorithmKind::gnb: return train_gnb(spec, data);
      case AlgorithmKind::knn: return KnnState{data.features, data.labels};
      case AlgorithmKind::linear_sgd: return train_linear(spec, data);
      case AlgorithmKind::decision_tree: {
        const Matrix columns = data.features.transposed();
        std::vector<double> weights(data.labels.size(), 1.0);
        Rng rng(spec.seed);
        return grow_classification_tree(columns, data.labels, weights,
                                        tree_options(spec, columns.rows(), SplitStrategy::best),
                                        rng);
      }
      case AlgorithmKind::bagged_trees:
      case AlgorithmKind::random_forest:
      case AlgorithmKind::extra_trees:
        return train_forest(spec, data, data.features.transposed(), exec);
      case AlgorithmKind::adaboost: return train_adaboost(spec, data, data.features.transposed());
      case AlgorithmKind::gradient_boosting:
        return train_boosting(spec, data, data.features.transposed());
    }
    throw ConfigError("unknown algorithm kind");
  }();

  TrainingMeta meta;
  meta.rows = data.features.rows();
  meta.cols = data.features.cols();
  meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return Model(spec, std::move(state), meta);
}

// --- prediction -------------------------------------------------------------

namespace {

std::array<double, 2> gnb_joint_log_likelihood(const GnbState& s, std::span<const double> x) {
  std::array<double, 2> jll{};
  constexpr double kTwoPi = 6.283185307179586;
  for (int c = 0; c < 2; ++c) {
    double acc = s.log_prior[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = s.variance[c][j];
      const double dev = x[j] - s.mean[c][j];
      acc -= 0.5 * std::log(kTwoPi * v) + 0.5 * dev * dev / v;
    }
    jll[c] = acc;
  }
  return jll;
}

double knn_security_fraction(const KnnState& s, int neighbors, std::span<const double> x) {
  const std::size_t n = s.points.rows();
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(neighbors), n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto p = s.points.row(r);
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d += (p[j] - x[j]) * (p[j] - x[j]);
    dist[r] = {d, r};  // equal distances resolve to the lower row index
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::size_t security = 0;
  for (std::size_t i = 0; i < k; ++i) security += s.labels[dist[i].second] == 1;
  return static_cast<double>(security) / static_cast<double>(k);
}

double adaboost_vote(const AdaBoostState& s, std::span<const double> x) {
  double vote = 0.0, total = 0.0;
  for (std::size_t m = 0; m < s.stumps.size(); ++m) {
    vote += s.alphas[m] * stump_vote(s.stumps[m], x);
    total += s.alphas[m];
  }
  return total > 0.0 ? vote / total : 0.0;
}

double boosting_margin(const BoostingState& s, std::span<const double> x) {
  double f = s.init;
  for (const auto& t : s.trees) f += s.shrinkage * t.evaluate(x);
  return f;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Prediction Model::predict(std::span<const double> x) const {
  if (x.size() != meta_.cols)
    throw DimensionError("expected " + std::to_string(meta_.cols) + " features, got " +
                         std::to_string(x.size()));
  auto label_of = [](bool security) { return security ? Label::security : Label::non_security; };
  return std::visit(
      Overloaded{
          [&](const GnbState& s) {
            const auto jll = gnb_joint_log_likelihood(s, x);
            return Prediction{label_of(jll[1] > jll[0]), sigmoid(jll[1] - jll[0])};
          },
          [&](const KnnState& s) {
            const double frac = knn_security_fraction(s, spec_.params.neighbors, x);
            return Prediction{label_of(frac > 0.5), frac};
          },
          [&](const LinearState& s) {
            const double margin = dot(s.weights, x) + s.bias;
            return Prediction{label_of(margin > 0.0), margin};
          },
          [&](const Tree& t) {
            const double p = t.evaluate(x);
            return Prediction{label_of(p > 0.5), p};
          },
          [&](const ForestState& s) {
            double p = 0.0;
            for (const auto& t : s.trees) p += t.evaluate(x);
            p /= static_cast<double>(s.trees.size());
            return Prediction{label_of(p > 0.5), p};
          },
          [&](const AdaBoostState& s) {
            const double vote = adaboost_vote(s, x);
            return Prediction{label_of(vote > 0.0), vote};
          },
          [&](const BoostingState& s) {
            const double f = boosting_margin(s, x);
            return Prediction{label_of(f > 0.0), sigmoid(f)};
          },
      },
      state_);
}

std::array<double, 2> Model::predict_proba(std::span<const double> x) const {
  const Prediction p = predict(x);
  double security = p.score;
  if (std::holds_alternative<GnbState>(state_)) {
    const auto jll = gnb_joint_log_likelihood(std::get<GnbState>(state_), x);
    return {sigmoid(jll[0] - jll[1]), sigmoid(jll[1] - jll[0])};
  }
  if (std::holds_alternative<LinearState>(state_)) security = sigmoid(p.score);
  if (std::holds_alternative<AdaBoostState>(state_)) security = 0.5 * (1.0 + p.score);
  return {1.0 - security, security};
}

std::vector<Prediction> Model::predict_batch(const Matrix& rows, Execution exec) const {
  if (rows.rows() > 0 && rows.cols() != meta_.cols)
    throw DimensionError("expected " + std::to_string(meta_.cols) + " features, got " +
                         std::to_string(rows.cols()));
  std::vector<Prediction> out(rows.rows());
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = predict(rows.row(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = predict(rows.row(i));
  }
  return out;
}

}  // namespace sbr
