#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sbr/errors.hpp"
#include "sbr/learners.hpp"

namespace sbr {

namespace {

using nlohmann::json;

json tree_to_json(const Tree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), value = json::array();
  for (const auto& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"value", value}};
}

Tree tree_from_json(const json& j) {
  const auto& feature = j.at("feature");
  std::vector<TreeNode> nodes(feature.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].feature = feature[i].get<std::int32_t>();
    nodes[i].threshold = j.at("threshold")[i].get<double>();
    nodes[i].left = j.at("left")[i].get<std::int32_t>();
    nodes[i].right = j.at("right")[i].get<std::int32_t>();
    nodes[i].value = j.at("value")[i].get<double>();
  }
  return Tree(std::move(nodes));
}

json trees_to_json(const std::vector<Tree>& trees) {
  json out = json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

std::vector<Tree> trees_from_json(const json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j) trees.push_back(tree_from_json(t));
  return trees;
}

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) throw DataError("matrix payload has the wrong size");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = data[r * m.cols() + c];
  return m;
}

json spec_to_json(const AlgorithmSpec& spec) {
  const auto& p = spec.params;
  return {
      {"kind", std::string(to_string(spec.kind))},
      {"seed", spec.seed},
      {"params",
       {{"var_smoothing", p.var_smoothing},
        {"neighbors", p.neighbors},
        {"loss", p.loss == SgdLoss::hinge ? "hinge" : "logistic"},
        {"learning_rate", p.learning_rate},
        {"epochs", p.epochs},
        {"l2", p.l2},
        {"n_estimators", p.n_estimators},
        {"max_depth", p.max_depth},
        {"min_samples_leaf", p.min_samples_leaf},
        {"max_features", p.max_features == FeatureSubset::all ? "all" : "sqrt"}}},
  };
}

AlgorithmSpec spec_from_json(const json& j) {
  const auto kind = parse_algorithm(j.at("kind").get<std::string>());
  if (!kind) throw DataError("model names an unknown algorithm");
  AlgorithmSpec spec = AlgorithmSpec::defaults(*kind, j.at("seed").get<std::uint64_t>());
  const auto& p = j.at("params");
  auto& h = spec.params;
  h.var_smoothing = p.at("var_smoothing").get<double>();
  h.neighbors = p.at("neighbors").get<int>();
  h.loss = p.at("loss").get<std::string>() == "hinge" ? SgdLoss::hinge : SgdLoss::logistic;
  h.learning_rate = p.at("learning_rate").get<double>();
  h.epochs = p.at("epochs").get<int>();
  h.l2 = p.at("l2").get<double>();
  h.n_estimators = p.at("n_estimators").get<int>();
  h.max_depth = p.at("max_depth").get<int>();
  h.min_samples_leaf = p.at("min_samples_leaf").get<int>();
  h.max_features = p.at("max_features").get<std::string>() == "all" ? FeatureSubset::all
                                                                    : FeatureSubset::sqrt;
  spec.validate();
  return spec;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json state_to_json(const ModelState& state) {
  return std::visit(
      Overloaded{
          [](const GnbState& s) -> json {
            return {{"log_prior", s.log_prior}, {"mean", s.mean}, {"variance", s.variance}};
          },
          [](const KnnState& s) -> json {
            return {{"points", matrix_to_json(s.points)}, {"labels", s.labels}};
          },
          [](const LinearState& s) -> json {
            return {{"weights", s.weights}, {"bias", s.bias}};
          },
          [](const Tree& t) -> json { return {{"tree", tree_to_json(t)}}; },
          [](const ForestState& s) -> json { return {{"trees", trees_to_json(s.trees)}}; },
          [](const AdaBoostState& s) -> json {
            return {{"stumps", trees_to_json(s.stumps)}, {"alphas", s.alphas}};
          },
          [](const BoostingState& s) -> json {
            return {{"init", s.init}, {"shrinkage", s.shrinkage}, {"trees", trees_to_json(s.trees)}};
          },
      },
      state);
}

ModelState state_from_json(AlgorithmKind kind, const json& j) {
  switch (kind) {
    case AlgorithmKind::gnb: {
      GnbState s;
      s.log_prior = j.at("log_prior").get<std::array<double, 2>>();
      s.mean = j.at("mean").get<std::array<std::vector<double>, 2>>();
      s.variance = j.at("variance").get<std::array<std::vector<double>, 2>>();
      return s;
    }
    case AlgorithmKind::knn:
      return KnnState{matrix_from_json(j.at("points")), j.at("labels").get<std::vector<int>>()};
    case AlgorithmKind::linear_sgd:
      return LinearState{j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>()};
    case AlgorithmKind::decision_tree: return tree_from_json(j.at("tree"));
    case AlgorithmKind::bagged_trees:
    case AlgorithmKind::random_forest:
    case AlgorithmKind::extra_trees: return ForestState{trees_from_json(j.at("trees"))};
    case AlgorithmKind::adaboost:
      return AdaBoostState{trees_from_json(j.at("stumps")), j.at("alphas").get<std::vector<double>>()};
    case AlgorithmKind::gradient_boosting:
      return BoostingState{j.at("init").get<double>(), j.at("shrinkage").get<double>(),
                           trees_from_json(j.at("trees"))};
  }
  throw DataError("unknown algorithm kind");
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j = {
      {"format", "sbr-model"},
      {"version", kModelFormatVersion},
      {"spec", spec_to_json(model.spec())},
      {"training_meta",
       {{"rows", model.meta().rows},
        {"cols", model.meta().cols},
        {"wall_seconds", model.meta().wall_seconds}}},
      {"state", state_to_json(model.state())},
  };
  return j.dump();
}

Model model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model blob is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "sbr-model")
    throw DataError("not a model blob");
  const int version = j.value("version", -1);
  if (version != kModelFormatVersion)
    throw VersionError("model format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kModelFormatVersion) + ")");
  try {
    AlgorithmSpec spec = spec_from_json(j.at("spec"));
    TrainingMeta meta;
    meta.rows = j.at("training_meta").at("rows").get<std::size_t>();
    meta.cols = j.at("training_meta").at("cols").get<std::size_t>();
    meta.wall_seconds = j.at("training_meta").at("wall_seconds").get<double>();
    ModelState state = state_from_json(spec.kind, j.at("state"));
    return Model(std::move(spec), std::move(state), meta);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model blob: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace sbr
