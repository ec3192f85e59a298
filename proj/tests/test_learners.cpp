#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "sbr/errors.hpp"
#include "sbr/learners.hpp"

using namespace sbr;

namespace {

LabeledDataset dataset(Matrix x, std::vector<int> y) { return {std::move(x), std::move(y), FeatureScheme::tf}; }

LabeledDataset separable(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::vector<int> y;
  auto x = test::separable_rows(n, d, seed, y);
  return dataset(std::move(x), std::move(y));
}

double training_accuracy(const Model& m, const LabeledDataset& data) {
  const auto preds = m.predict_batch(data.features);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    ok += (preds[i].label == Label::security) == (data.labels[i] == 1);
  return static_cast<double>(ok) / static_cast<double>(preds.size());
}

Matrix column(std::initializer_list<double> values) {
  Matrix m(0, 1);
  for (double v : values) m.append_row(std::vector<double>{v});
  return m;
}

}  // namespace

TEST_CASE("gini impurity") {
  CHECK(gini_impurity(std::vector<int>{1, 1, 0, 0}) == 0.5);
  CHECK(gini_impurity(std::vector<int>{1, 1, 1, 1}) == 0.0);
  CHECK(gini_impurity(std::vector<int>{1, 1, 1, 0}) == 0.375);
  CHECK_THROWS_AS(gini_impurity(std::vector<int>{}), DataError);
}

TEST_CASE("algorithm names round-trip") {
  for (auto k : kAllAlgorithms) CHECK(parse_algorithm(to_string(k)) == k);
  CHECK_FALSE(parse_algorithm("svm").has_value());
}

TEST_CASE("hyperparameter overrides") {
  auto spec = AlgorithmSpec::defaults(AlgorithmKind::knn);
  CHECK(spec.params.neighbors == 5);
  spec.set("neighbors", "3");
  CHECK(spec.params.neighbors == 3);
  CHECK_THROWS_AS(spec.set("neighbours", "3"), ConfigError);
  CHECK_THROWS_AS(spec.set("neighbors", "0"), ConfigError);
  CHECK_THROWS_AS(spec.set("neighbors", "three"), ConfigError);
}

TEST_CASE("documented defaults") {
  const auto rf = AlgorithmSpec::defaults(AlgorithmKind::random_forest);
  CHECK(rf.params.n_estimators == 100);
  CHECK(rf.params.max_features == FeatureSubset::sqrt);
  const auto ada = AlgorithmSpec::defaults(AlgorithmKind::adaboost);
  CHECK(ada.params.n_estimators == 50);
  CHECK(ada.params.max_depth == 1);
  const auto gb = AlgorithmSpec::defaults(AlgorithmKind::gradient_boosting);
  CHECK(gb.params.n_estimators == 100);
  CHECK(gb.params.max_depth == 3);
  CHECK(gb.params.learning_rate == 0.1);
  const auto sgd = AlgorithmSpec::defaults(AlgorithmKind::linear_sgd);
  CHECK(sgd.params.loss == SgdLoss::hinge);
  CHECK(sgd.params.epochs == 50);
}

TEST_CASE("training data validation") {
  const auto spec = AlgorithmSpec::defaults(AlgorithmKind::decision_tree);
  CHECK_THROWS_AS(train(spec, dataset(column({1, 2, 3}), {1, 1, 1})), DegenerateTrainingError);
  CHECK_THROWS_AS(train(spec, dataset(Matrix(3, 0), {1, 0, 1})), DimensionError);
  CHECK_THROWS_AS(train(spec, dataset(column({1, 2}), {1, 0, 1})), DimensionError);
}

TEST_CASE("gnb puts the boundary at the midpoint of symmetric classes") {
  const auto data = dataset(column({-1.1, -1.0, -0.9, 0.9, 1.0, 1.1}), {0, 0, 0, 1, 1, 1});
  const auto m = train(AlgorithmSpec::defaults(AlgorithmKind::gnb), data);
  CHECK(m.predict(std::vector<double>{-0.5}).label == Label::non_security);
  CHECK(m.predict(std::vector<double>{0.5}).label == Label::security);
  const auto p = m.predict_proba(std::vector<double>{0.0});
  CHECK(p[0] == doctest::Approx(0.5));
}

TEST_CASE("gnb posteriors sum to one") {
  const auto data = separable(200, 6, 3);
  const auto m = train(AlgorithmSpec::defaults(AlgorithmKind::gnb), data);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform() * 6.0 - 3.0;
    const auto p = m.predict_proba(x);
    CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-9);
  }
}

TEST_CASE("knn with one neighbour memorizes distinct rows") {
  const auto data = separable(80, 4, 7);
  auto spec = AlgorithmSpec::defaults(AlgorithmKind::knn);
  spec.set("neighbors", "1");
  const auto m = train(spec, data);
  for (std::size_t r = 0; r < data.features.rows(); ++r) {
    const auto p = m.predict(data.features.row(r));
    CHECK((p.label == Label::security) == (data.labels[r] == 1));
    if (data.labels[r] == 1) CHECK(p.score == 1.0);
  }
}

TEST_CASE("knn distance ties go to the lower row index") {
  // two equidistant neighbours with different labels
  const auto data = dataset(column({-1.0, 1.0}), {1, 0});
  auto spec = AlgorithmSpec::defaults(AlgorithmKind::knn);
  spec.set("neighbors", "1");
  CHECK(train(spec, data).predict(std::vector<double>{0.0}).label == Label::security);
  const auto flipped = dataset(column({1.0, -1.0}), {0, 1});
  CHECK(train(spec, flipped).predict(std::vector<double>{0.0}).label == Label::non_security);
}

TEST_CASE("linear-sgd score is the margin") {
  const auto data = separable(100, 3, 9);
  const auto m = train(AlgorithmSpec::defaults(AlgorithmKind::linear_sgd), data);
  const auto& s = std::get<LinearState>(m.state());
  const std::vector<double> x{0.3, -0.2, 0.7};
  const double margin = s.weights[0] * x[0] + s.weights[1] * x[1] + s.weights[2] * x[2] + s.bias;
  const auto p = m.predict(x);
  CHECK(p.score == doctest::Approx(margin).epsilon(1e-12));
  CHECK((p.label == Label::security) == (margin > 0));
}

TEST_CASE("decision tree reaches full training accuracy on conflict-free binary data") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<std::vector<double>> seen;
    Matrix x(0, 10);
    std::vector<int> y;
    while (x.rows() < 50) {
      std::vector<double> row(10);
      for (auto& v : row) v = static_cast<double>(rng.below(2));
      if (!seen.insert(row).second) continue;
      x.append_row(row);
      y.push_back(static_cast<int>(rng.below(2)));
    }
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) continue;
    const auto data = dataset(x, y);
    CHECK(training_accuracy(train(AlgorithmSpec::defaults(AlgorithmKind::decision_tree), data), data) == 1.0);
  }
}

TEST_CASE("every kind except gnb fits linearly separable data") {
  const auto data = separable(300, 5, 21);
  for (auto kind : kAllAlgorithms) {
    if (kind == AlgorithmKind::gnb) continue;
    const auto m = train(AlgorithmSpec::defaults(kind, 4), data);
    CHECK_MESSAGE(training_accuracy(m, data) >= 0.95, to_string(kind));
  }
}

TEST_CASE("training is deterministic and serial equals parallel") {
  const auto data = separable(150, 8, 25);
  for (auto kind : kAllAlgorithms) {
    const auto spec = AlgorithmSpec::defaults(kind, 99);
    const auto a = train(spec, data, Execution::serial);
    const auto b = train(spec, data, Execution::parallel);
    const auto c = train(spec, data, Execution::parallel);
    const auto pa = a.predict_batch(data.features, Execution::serial);
    const auto pb = b.predict_batch(data.features, Execution::parallel);
    const auto pc = c.predict_batch(data.features, Execution::parallel);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK_MESSAGE(pa[i].score == pb[i].score, to_string(kind));
      CHECK(pb[i].score == pc[i].score);
      CHECK(pa[i].label == pb[i].label);
    }
  }
}

TEST_CASE("deterministic learners ignore training-row order") {
  const auto data = separable(120, 4, 33);
  std::vector<std::size_t> perm(data.labels.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(2);
  rng.shuffle(std::span<std::size_t>(perm));
  Matrix px(0, 4);
  std::vector<int> py;
  for (auto i : perm) {
    px.append_row(data.features.row(i));
    py.push_back(data.labels[i]);
  }
  const auto permuted = dataset(px, py);
  for (auto kind : {AlgorithmKind::gnb, AlgorithmKind::knn, AlgorithmKind::decision_tree}) {
    const auto a = train(AlgorithmSpec::defaults(kind), data);
    const auto b = train(AlgorithmSpec::defaults(kind), permuted);
    Rng probe(kind == AlgorithmKind::knn ? 1 : 2);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> x(4);
      for (auto& v : x) v = probe.uniform() * 2.0 - 1.0;
      CHECK_MESSAGE(a.predict(x).label == b.predict(x).label, to_string(kind));
      CHECK(a.predict(x).score == doctest::Approx(b.predict(x).score).epsilon(1e-12));
    }
  }
}

TEST_CASE("adaboost with unanimous stumps gives the maximal vote") {
  AdaBoostState s;
  for (int i = 0; i < 3; ++i) {
    s.stumps.push_back(Tree({TreeNode{-1, 0.0, -1, -1, 1.0}}));
    s.alphas.push_back(0.5 + i);
  }
  const Model m(AlgorithmSpec::defaults(AlgorithmKind::adaboost), s, TrainingMeta{1, 1, 0.0});
  const auto p = m.predict(std::vector<double>{0.0});
  CHECK(p.label == Label::security);
  CHECK(p.score == 1.0);
}

TEST_CASE("adaboost exponential loss never increases across rounds") {
  // Training error itself can tick up between rounds; the bound that SAMME
  // minimizes, mean exp(-y F_t / 2), cannot.
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = separable(120, 6, rng.next());
    LabeledDataset noisy = data;
    for (auto& y : noisy.labels)
      if (rng.bernoulli(0.1)) y = 1 - y;
    const auto m = train(AlgorithmSpec::defaults(AlgorithmKind::adaboost), noisy);
    const auto& s = std::get<AdaBoostState>(m.state());
    std::vector<double> f(noisy.labels.size(), 0.0);
    double previous = 1.0;
    for (std::size_t t = 0; t < s.stumps.size(); ++t) {
      double loss = 0.0, errors = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] += s.alphas[t] * (s.stumps[t].evaluate(noisy.features.row(i)) > 0.5 ? 1.0 : -1.0);
        const double y = noisy.labels[i] == 1 ? 1.0 : -1.0;
        loss += std::exp(-y * f[i] / 2.0);
        errors += (y * f[i] <= 0.0);
      }
      loss /= static_cast<double>(f.size());
      errors /= static_cast<double>(f.size());
      CHECK(loss <= previous + 1e-12);
      CHECK(errors <= loss + 1e-12);
      previous = loss;
    }
  }
}

TEST_CASE("prediction dimension check") {
  const auto data = separable(40, 3, 41);
  const auto m = train(AlgorithmSpec::defaults(AlgorithmKind::decision_tree), data);
  CHECK_THROWS_AS(m.predict(std::vector<double>{1.0}), DimensionError);
  CHECK_THROWS_AS(m.predict_batch(Matrix(2, 5)), DimensionError);
}

TEST_CASE("model persistence round-trips predictions") {
  const auto data = separable(100, 5, 43);
  const auto dir = test::scratch_dir("models");
  for (auto kind : kAllAlgorithms) {
    const auto m = train(AlgorithmSpec::defaults(kind, 3), data);
    const auto path = dir / (std::string(to_string(kind)) + ".json");
    save_model(m, path);
    const auto loaded = load_model(path);
    CHECK(loaded.spec() == m.spec());
    CHECK(loaded.meta().cols == 5);
    const auto a = m.predict_batch(data.features);
    const auto b = loaded.predict_batch(data.features);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK_MESSAGE(a[i].score == b[i].score, to_string(kind));
  }
}

TEST_CASE("model loading rejects other format versions") {
  const auto data = separable(30, 2, 47);
  auto text = model_to_json(train(AlgorithmSpec::defaults(AlgorithmKind::gnb), data));
  const auto pos = text.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "\"version\":2");
  CHECK_THROWS_AS(model_from_json(text), VersionError);
  CHECK_THROWS_AS(model_from_json("{}"), DataError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

TEST_CASE("tree splits at midpoints and prefers the lowest feature on ties") {
  // feature 1 duplicates feature 0, so both give the same gain
  Matrix x(0, 2);
  for (double v : {1.0, 2.0, 3.0, 4.0}) x.append_row(std::vector<double>{v, v});
  const std::vector<int> y{0, 0, 1, 1};
  const std::vector<double> w(4, 1.0);
  Rng rng(0);
  const auto t = grow_classification_tree(x.transposed(), y, w, TreeOptions{}, rng);
  REQUIRE(t.nodes().size() == 3);
  CHECK(t.nodes()[0].feature == 0);
  CHECK(t.nodes()[0].threshold == 2.5);
  CHECK(t.leaf_count() == 2);
  CHECK(t.depth() == 1);
}

TEST_CASE("tree leaves out zero-weight rows") {
  const Matrix x = column({1.0, 2.0, 3.0});
  const std::vector<int> y{0, 1, 0};
  const std::vector<double> w{1.0, 0.0, 1.0};
  Rng rng(0);
  const auto t = grow_classification_tree(x.transposed(), y, w, TreeOptions{}, rng);
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].value == 0.0);
}

TEST_CASE("regression tree leaves are newton steps") {
  const Matrix x = column({0.0, 0.0, 1.0, 1.0});
  const std::vector<double> r{0.5, 0.3, -0.2, -0.4};
  const std::vector<double> h{0.25, 0.25, 0.5, 0.5};
  Rng rng(0);
  TreeOptions o;
  o.max_depth = 1;
  const auto t = grow_regression_tree(x.transposed(), r, h, o, rng);
  CHECK(t.evaluate(std::vector<double>{0.0}) == doctest::Approx(0.8 / 0.5));
  CHECK(t.evaluate(std::vector<double>{1.0}) == doctest::Approx(-0.6 / 1.0));
}
