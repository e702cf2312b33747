#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"
#include "photoscreen/common/rng.hpp"

namespace photoscreen::forest {

struct ForestConfig {
  int n_estimators = 1200;
  std::optional<int> max_depth;  // nullopt = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  enum class MaxFeatures { log2, sqrt, all };
  MaxFeatures max_features = MaxFeatures::sqrt;
  std::uint64_t seed = 0;
  bool bootstrap = true;  // test hook; production forests always bag

  // A 1-row split is undefined; the published grid nevertheless lists 1, so
  // it normalizes to 2. Returns true when a normalization happened.
  bool normalize() {
    if (min_samples_split < 2) {
      min_samples_split = 2;
      return true;
    }
    return false;
  }

  void validate() const {
    if (n_estimators < 1) throw ValidationError("forest: n_estimators must be >= 1");
    if (min_samples_split < 2) throw ValidationError("forest: min_samples_split must be >= 2");
    if (min_samples_leaf < 1) throw ValidationError("forest: min_samples_leaf must be >= 1");
    if (max_depth && *max_depth < 1) throw ValidationError("forest: max_depth must be >= 1");
  }

  std::size_t features_per_split(std::size_t n_features) const {
    switch (max_features) {
      case MaxFeatures::log2:
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n_features)))));
      case MaxFeatures::sqrt:
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
      default:
        return n_features;
    }
  }
};

inline std::string max_features_name(ForestConfig::MaxFeatures mf) {
  switch (mf) {
    case ForestConfig::MaxFeatures::log2: return "log2";
    case ForestConfig::MaxFeatures::sqrt: return "sqrt";
    default: return "all";
  }
}

// CART binary tree over double features, two classes, Gini splits.
struct DecisionTree {
  struct Node {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;   // x[feature] < threshold
    int right = -1;  // x[feature] >= threshold
    std::array<long, 2> counts = {0, 0};
  };
  std::vector<Node> nodes;

  int predict_row(const Mat& x, std::size_t row) const {
    int at = 0;
    while (!nodes[at].leaf) {
      at = x(row, nodes[at].feature) < nodes[at].threshold ? nodes[at].left : nodes[at].right;
    }
    // majority; ties go to the lower class index
    return nodes[at].counts[1] > nodes[at].counts[0] ? 1 : 0;
  }
};

namespace detail {

// Weighted child impurity, exact in the integer counts:
//   sum_children n_c - (c0^2 + c1^2) / n_c
// Minimizing this equals maximizing Gini gain; the same expression is the
// contract for the exhaustive-enumeration oracle.
inline double split_score(long l0, long l1, long r0, long r1) {
  const double nl = static_cast<double>(l0 + l1);
  const double nr = static_cast<double>(r0 + r1);
  const double sl = nl - (static_cast<double>(l0) * l0 + static_cast<double>(l1) * l1) / nl;
  const double sr = nr - (static_cast<double>(r0) * r0 + static_cast<double>(r1) * r1) / nr;
  return sl + sr;
}

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

// Candidate thresholds are midpoints between consecutive distinct sorted
// values. Ties resolve to the earliest feature in candidate order, then the
// lowest threshold (strict < comparison keeps the first optimum seen).
inline BestSplit find_best_split(const Mat& x, const std::vector<int>& y,
                                 const std::vector<std::size_t>& rows,
                                 const std::vector<int>& features, int min_samples_leaf) {
  BestSplit best;
  const std::size_t n = rows.size();
  std::vector<std::pair<double, std::size_t>> order(n);
  for (int feature : features) {
    for (std::size_t i = 0; i < n; ++i) order[i] = {x(rows[i], feature), rows[i]};
    std::sort(order.begin(), order.end());

    long total1 = 0;
    for (std::size_t i = 0; i < n; ++i) total1 += y[order[i].second];
    const long total0 = static_cast<long>(n) - total1;

    long left0 = 0, left1 = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left1 += y[order[i].second];
      left0 += 1 - y[order[i].second];
      if (order[i].first == order[i + 1].first) continue;  // not a boundary
      const long nl = static_cast<long>(i) + 1;
      const long nr = static_cast<long>(n) - nl;
      if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
      const double score = split_score(left0, left1, total0 - left0, total1 - left1);
      if (!best.found || score < best.score) {
        best.found = true;
        best.feature = feature;
        best.threshold = order[i].first + (order[i + 1].first - order[i].first) / 2.0;
        best.score = score;
      }
    }
  }
  return best;
}

}  // namespace detail

// Grows one CART tree on the given row sample. A fresh random feature subset
// is drawn per node from rng (except max_features = all, which consumes no
// randomness and scans features in index order).
inline DecisionTree train_tree(const Mat& x, const std::vector<int>& y,
                               const ForestConfig& config, const std::vector<std::size_t>& rows,
                               Rng& rng) {
  config.validate();
  if (rows.empty()) throw ValidationError("train_tree: empty row sample");
  const std::size_t n_features = x.cols;
  const std::size_t subset = config.features_per_split(n_features);

  DecisionTree tree;
  struct Work {
    int node;
    std::vector<std::size_t> rows;
    int depth;
  };
  std::vector<Work> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, rows, 0});

  std::vector<int> all_features(n_features);
  std::iota(all_features.begin(), all_features.end(), 0);

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    DecisionTree::Node& node = tree.nodes[work.node];

    std::array<long, 2> counts = {0, 0};
    for (std::size_t r : work.rows) counts[static_cast<std::size_t>(y[r])] += 1;
    node.counts = counts;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool too_small = static_cast<int>(work.rows.size()) < config.min_samples_split;
    const bool too_deep = config.max_depth && work.depth >= *config.max_depth;
    if (pure || too_small || too_deep) continue;  // stays a leaf

    std::vector<int> candidates;
    if (subset >= n_features) {
      candidates = all_features;
    } else {
      // partial Fisher-Yates over a fresh index array
      std::vector<int> pool = all_features;
      for (std::size_t i = 0; i < subset; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
        std::swap(pool[i], pool[j]);
        candidates.push_back(pool[i]);
      }
    }

    const auto best =
        detail::find_best_split(x, y, work.rows, candidates, config.min_samples_leaf);
    if (!best.found) continue;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : work.rows) {
      (x(r, best.feature) < best.threshold ? left_rows : right_rows).push_back(r);
    }

    const int left_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    DecisionTree::Node& parent = tree.nodes[work.node];  // re-fetch after growth
    parent.leaf = false;
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left_index;
    parent.right = left_index + 1;
    stack.push_back({left_index + 1, std::move(right_rows), work.depth + 1});
    stack.push_back({left_index, std::move(left_rows), work.depth + 1});
  }
  return tree;
}

}  // namespace photoscreen::forest
