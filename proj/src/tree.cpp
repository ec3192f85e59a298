#include "sbr/tree.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "sbr/errors.hpp"

namespace sbr {

double Tree::evaluate(std::span<const double> x) const {
  std::int32_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  // children always follow their parent in preorder
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return deepest;
}

double gini_impurity(std::span<const int> labels) {
  if (labels.empty()) throw DataError("gini impurity of an empty label list");
  const auto n = static_cast<double>(labels.size());
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double p1 = pos / n, p0 = 1.0 - p1;
  return 1.0 - (p0 * p0 + p1 * p1);
}

namespace {

struct ClassificationProblem {
  std::span<const int> labels;
  std::span<const double> weights;

  struct Stats {
    double w0 = 0.0, w1 = 0.0;
    std::size_t n = 0;
  };

  void add(Stats& s, std::uint32_t row) const {
    (labels[row] == 1 ? s.w1 : s.w0) += weights[row];
    ++s.n;
  }
  static Stats minus(const Stats& a, const Stats& b) { return {a.w0 - b.w0, a.w1 - b.w1, a.n - b.n}; }
  static Stats plus(const Stats& a, const Stats& b) { return {a.w0 + b.w0, a.w1 + b.w1, a.n + b.n}; }
  // sum_c w_c^2 / W: maximizing the children's total minimizes weighted Gini
  static double proxy(const Stats& s) {
    const double w = s.w0 + s.w1;
    return w > 0.0 ? (s.w0 * s.w0 + s.w1 * s.w1) / w : 0.0;
  }
  static bool pure(const Stats& s) { return s.w0 <= 0.0 || s.w1 <= 0.0; }
  double leaf_value(const Stats& s) const {
    const double w = s.w0 + s.w1;
    return w > 0.0 ? s.w1 / w : 0.0;
  }
};

struct RegressionProblem {
  std::span<const double> targets;
  std::span<const double> denominators;

  struct Stats {
    double sum = 0.0, sum_sq = 0.0, denom = 0.0;
    std::size_t n = 0;
  };

  void add(Stats& s, std::uint32_t row) const {
    const double t = targets[row];
    s.sum += t;
    s.sum_sq += t * t;
    s.denom += denominators[row];
    ++s.n;
  }
  static Stats minus(const Stats& a, const Stats& b) {
    return {a.sum - b.sum, a.sum_sq - b.sum_sq, a.denom - b.denom, a.n - b.n};
  }
  static Stats plus(const Stats& a, const Stats& b) {
    return {a.sum + b.sum, a.sum_sq + b.sum_sq, a.denom + b.denom, a.n + b.n};
  }
  static double proxy(const Stats& s) {
    return s.n > 0 ? s.sum * s.sum / static_cast<double>(s.n) : 0.0;
  }
  static bool pure(const Stats& s) {
    const double n = static_cast<double>(s.n);
    const double mean = s.sum / n;
    return s.sum_sq / n - mean * mean <= DBL_EPSILON;
  }
  double leaf_value(const Stats& s) const {
    return std::abs(s.denom) < 1e-150 ? 0.0 : s.sum / s.denom;
  }
};

struct Split {
  double proxy = -std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  double threshold = 0.0;
};

template <class Problem>
class Grower {
  using Stats = typename Problem::Stats;

 public:
  Grower(const Matrix& columns, Problem problem, std::vector<std::uint32_t> rows,
         const TreeOptions& options, Rng& rng)
      : columns_(columns), problem_(problem), rows_(std::move(rows)), options_(options),
        rng_(rng), features_(columns.rows()) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  Tree grow() {
    if (!rows_.empty()) build(0, rows_.size(), 0);
    return Tree(std::move(nodes_));
  }

 private:
  double x(std::size_t feature, std::uint32_t row) const { return columns_(feature, row); }

  std::int32_t build(std::size_t start, std::size_t end, int depth) {
    Stats node;
    for (std::size_t i = start; i < end; ++i) problem_.add(node, rows_[i]);

    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, problem_.leaf_value(node)});

    const bool depth_ok = options_.max_depth <= 0 || depth < options_.max_depth;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, options_.min_samples_leaf));
    if (!depth_ok || node.n < 2 * min_leaf || Problem::pure(node)) return id;

    const auto split = find_split(start, end, node, min_leaf);
    if (!split) return id;

    const auto mid_it = std::partition(
        rows_.begin() + start, rows_.begin() + end,
        [&](std::uint32_t r) { return x(split->feature, r) <= split->threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

    nodes_[id].feature = static_cast<std::int32_t>(split->feature);
    nodes_[id].threshold = split->threshold;
    const auto left = build(start, mid, depth + 1);
    const auto right = build(mid, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  static bool better(const Split& candidate, const Split& incumbent) {
    if (candidate.proxy != incumbent.proxy) return candidate.proxy > incumbent.proxy;
    return candidate.feature < incumbent.feature;
  }

  std::optional<Split> find_split(std::size_t start, std::size_t end, const Stats& node,
                                  std::size_t min_leaf) {
    const std::size_t n_features = features_.size();
    const bool subsample = options_.max_features > 0 && options_.max_features < n_features;
    std::optional<Split> best;
    std::size_t informative = 0;
    for (std::size_t i = 0; i < n_features; ++i) {
      if (subsample) {
        const auto j = i + static_cast<std::size_t>(rng_.below(n_features - i));
        std::swap(features_[i], features_[j]);
      }
      const std::size_t f = features_[i];
      bool constant = true;
      std::optional<Split> candidate =
          options_.strategy == SplitStrategy::best
              ? best_threshold(f, start, end, node, min_leaf, constant)
              : random_threshold(f, start, end, node, min_leaf, constant);
      if (!constant) ++informative;
      if (candidate && (!best || better(*candidate, *best))) best = candidate;
      if (subsample && informative >= options_.max_features) break;
    }
    return best;
  }

  std::optional<Split> best_threshold(std::size_t f, std::size_t start, std::size_t end,
                                      const Stats& node, std::size_t min_leaf, bool& constant) {
    // Features are mostly zero: accumulate the zero block in one pass and
    // sort only the non-zero entries.
    Stats zeros;
    nonzero_.clear();
    for (std::size_t i = start; i < end; ++i) {
      const auto r = rows_[i];
      const double v = x(f, r);
      if (v == 0.0) {
        problem_.add(zeros, r);
      } else {
        nonzero_.emplace_back(v, r);
      }
    }
    std::sort(nonzero_.begin(), nonzero_.end());

    const auto first_positive = static_cast<std::size_t>(
        std::lower_bound(nonzero_.begin(), nonzero_.end(), std::pair<double, std::uint32_t>(0.0, 0)) -
        nonzero_.begin());

    std::optional<Split> best;
    Stats left;
    bool have_prev = false;
    double prev = 0.0;
    auto consider = [&](double next) {
      // boundary between `prev` (last value on the left) and `next`
      if (!have_prev) return;
      constant = false;
      const std::size_t n_right = node.n - left.n;
      if (left.n < min_leaf || n_right < min_leaf) return;
      const Stats right = Problem::minus(node, left);
      const double proxy = Problem::proxy(left) + Problem::proxy(right);
      if (best && !(proxy > best->proxy)) return;
      double thr = prev + (next - prev) / 2.0;
      if (thr >= next || thr < prev) thr = prev;
      best = Split{proxy, f, thr};
    };

    std::size_t i = 0;
    auto take_run = [&](std::size_t stop) {
      while (i < stop) {
        const double v = nonzero_[i].first;
        consider(v);
        while (i < stop && nonzero_[i].first == v) problem_.add(left, nonzero_[i++].second);
        prev = v;
        have_prev = true;
      }
    };
    take_run(first_positive);
    if (zeros.n > 0) {
      consider(0.0);
      left = Problem::plus(left, zeros);
      prev = 0.0;
      have_prev = true;
    }
    take_run(nonzero_.size());
    return best;
  }

  std::optional<Split> random_threshold(std::size_t f, std::size_t start, std::size_t end,
                                        const Stats& node, std::size_t min_leaf, bool& constant) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = start; i < end; ++i) {
      const double v = x(f, rows_[i]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) return std::nullopt;
    constant = false;
    double thr = lo + rng_.uniform() * (hi - lo);
    if (thr >= hi) thr = lo;

    Stats left;
    for (std::size_t i = start; i < end; ++i)
      if (x(f, rows_[i]) <= thr) problem_.add(left, rows_[i]);
    if (left.n < min_leaf || node.n - left.n < min_leaf) return std::nullopt;
    const Stats right = Problem::minus(node, left);
    return Split{Problem::proxy(left) + Problem::proxy(right), f, thr};
  }

  const Matrix& columns_;
  Problem problem_;
  std::vector<std::uint32_t> rows_;
  const TreeOptions& options_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::uint32_t>> nonzero_;
};

}  // namespace

Tree grow_classification_tree(const Matrix& columns, std::span<const int> labels,
                              std::span<const double> weights, const TreeOptions& options,
                              Rng& rng) {
  std::vector<std::uint32_t> rows;
  for (std::size_t r = 0; r < labels.size(); ++r)
    if (weights[r] > 0.0) rows.push_back(static_cast<std::uint32_t>(r));
  ClassificationProblem problem{labels, weights};
  return Grower<ClassificationProblem>(columns, problem, std::move(rows), options, rng).grow();
}

Tree grow_regression_tree(const Matrix& columns, std::span<const double> targets,
                          std::span<const double> leaf_denominators, const TreeOptions& options,
                          Rng& rng) {
  std::vector<std::uint32_t> rows(targets.size());
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  RegressionProblem problem{targets, leaf_denominators};
  return Grower<RegressionProblem>(columns, problem, std::move(rows), options, rng).grow();
}

}  // namespace sbr
