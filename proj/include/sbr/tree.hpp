#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbr/matrix.hpp"
#include "sbr/random.hpp"

namespace sbr {

// Internal node: x[feature] <= threshold goes left. Leaves have feature -1.
// `value` is P(security) for classification trees and the fitted output
// for regression trees; internal nodes keep it too.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double evaluate(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

enum class SplitStrategy {
  best,    // exhaustive midpoint thresholds
  random,  // one uniform threshold in (min, max) per candidate feature
};

struct TreeOptions {
  int max_depth = 0;  // 0 = unlimited
  int min_samples_leaf = 1;
  // Number of non-constant features examined per node, drawn in random
  // order; 0 examines every feature in index order.
  std::size_t max_features = 0;
  SplitStrategy strategy = SplitStrategy::best;
};

// `columns` is the transposed training matrix (one row per feature).
// Rows with zero weight are left out. Splits minimize weighted Gini
// impurity; an impure node is split whenever some valid split exists.
// Equal-gain candidates resolve to the lowest feature index, then the
// lowest threshold.
Tree grow_classification_tree(const Matrix& columns, std::span<const int> labels,
                              std::span<const double> weights, const TreeOptions& options,
                              Rng& rng);

// Squared-error splits on `targets`; each leaf outputs
// sum(targets) / sum(leaf_denominators) over its rows (0 when the
// denominator vanishes).
Tree grow_regression_tree(const Matrix& columns, std::span<const double> targets,
                          std::span<const double> leaf_denominators, const TreeOptions& options,
                          Rng& rng);

// 1 - sum_c p_c^2 over binary labels. Throws DataError on empty input.
double gini_impurity(std::span<const int> labels);

}  // namespace sbr
