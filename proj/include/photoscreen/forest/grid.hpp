#pragma once

#include <optional>
#include <string>
#include <vector>

#include "photoscreen/common/csv.hpp"
#include "photoscreen/forest/forest.hpp"
#include "photoscreen/forest/metrics.hpp"
#include "photoscreen/forest/split.hpp"

namespace photoscreen::forest {

struct HyperGrid {
  std::vector<int> n_estimators = {120, 300, 500, 800, 1200};
  std::vector<std::optional<int>> max_depth = {5, 8, 15, 25, 30, std::nullopt};
  std::vector<int> min_samples_split = {1, 2, 5, 10, 15, 100};
  std::vector<int> min_samples_leaf = {1, 2, 5, 10};
  std::vector<ForestConfig::MaxFeatures> max_features = {ForestConfig::MaxFeatures::log2,
                                                         ForestConfig::MaxFeatures::sqrt,
                                                         ForestConfig::MaxFeatures::all};

  std::size_t size() const {
    return n_estimators.size() * max_depth.size() * min_samples_split.size() *
           min_samples_leaf.size() * max_features.size();
  }

  void validate() const {
    if (size() == 0) throw ValidationError("hyperparameter grid is empty");
  }

  // the published 5 x 6 x 6 x 4 x 3 grid
  static HyperGrid paper() { return {}; }

  // desk-scale grid for fast runs
  static HyperGrid reduced() {
    HyperGrid g;
    g.n_estimators = {120, 300};
    g.max_depth = {8, std::nullopt};
    g.min_samples_split = {2};
    g.min_samples_leaf = {1, 5};
    g.max_features = {ForestConfig::MaxFeatures::sqrt};
    return g;
  }
};

// Cross-validation selection metric; F1 unless explicitly overridden.
enum class CvScoring { f1, accuracy };

inline std::string cv_scoring_name(CvScoring s) {
  return s == CvScoring::f1 ? "f1" : "accuracy";
}

struct CvRow {
  ForestConfig config;
  int listed_min_samples_split = 2;  // grid value before normalization
  std::vector<double> fold_score;    // undefined scores count as 0
  double mean_score = 0.0;
};

struct GridSearchResult {
  ForestConfig best;
  CvScoring scoring = CvScoring::f1;
  std::vector<CvRow> table;
  std::vector<std::string> warnings;
};

// Exhaustive traversal of the grid with stratified k-fold cross-validation,
// selecting by mean F1 (or accuracy when overridden). Ties prefer fewer
// trees, then shallower depth (unlimited counts as deepest), then earlier
// grid order.
inline GridSearchResult grid_search(const Mat& x, const std::vector<int>& y,
                                    const HyperGrid& grid, int k, std::uint64_t seed,
                                    int n_threads = 1, CvScoring scoring = CvScoring::f1) {
  grid.validate();
  const auto folds = stratified_kfold(y, k, seed);

  GridSearchResult result;
  result.scoring = scoring;
  bool warned_mss = false;
  std::size_t combo = 0;
  double best_score = -1.0;

  auto depth_rank = [](const std::optional<int>& d) {
    return d ? *d : std::numeric_limits<int>::max();
  };

  for (int n_est : grid.n_estimators) {
    for (const auto& depth : grid.max_depth) {
      for (int mss : grid.min_samples_split) {
        for (int msl : grid.min_samples_leaf) {
          for (auto mf : grid.max_features) {
            CvRow row;
            row.listed_min_samples_split = mss;
            row.config.n_estimators = n_est;
            row.config.max_depth = depth;
            row.config.min_samples_split = mss;
            row.config.min_samples_leaf = msl;
            row.config.max_features = mf;
            if (row.config.normalize() && !warned_mss) {
              result.warnings.push_back(
                  "min_samples_split=1 normalized to 2 (a 1-row split is undefined)");
              warned_mss = true;
            }
            row.config.seed = derive_seed(seed, 10000 + combo);

            double total = 0.0;
            for (int f = 0; f < k; ++f) {
              std::vector<std::size_t> train_rows;
              for (int other = 0; other < k; ++other) {
                if (other == f) continue;
                train_rows.insert(train_rows.end(), folds[other].begin(), folds[other].end());
              }
              std::sort(train_rows.begin(), train_rows.end());
              ForestConfig fold_config = row.config;
              fold_config.seed = derive_seed(row.config.seed, static_cast<std::uint64_t>(f));
              const ForestModel model = train_forest(x, y, fold_config, train_rows, n_threads);
              const std::vector<int> predicted = model.predict(x, folds[f]);
              std::vector<int> truth;
              truth.reserve(folds[f].size());
              for (std::size_t r : folds[f]) truth.push_back(y[r]);
              const ConfusionMetrics m = evaluate(truth, predicted);
              const double score = (scoring == CvScoring::f1 ? m.f1 : m.accuracy).value_or(0.0);
              row.fold_score.push_back(score);
              total += score;
            }
            row.mean_score = total / static_cast<double>(k);

            const bool better =
                row.mean_score > best_score ||
                (row.mean_score == best_score &&
                 (row.config.n_estimators < result.best.n_estimators ||
                  (row.config.n_estimators == result.best.n_estimators &&
                   depth_rank(row.config.max_depth) < depth_rank(result.best.max_depth))));
            if (combo == 0 || better) {
              result.best = row.config;
              best_score = row.mean_score;
            }
            result.table.push_back(std::move(row));
            ++combo;
          }
        }
      }
    }
  }
  return result;
}

inline std::string cv_table_to_csv(const GridSearchResult& result) {
  const std::string metric = cv_scoring_name(result.scoring);
  std::string out = "n_estimators,max_depth,min_samples_split,min_samples_leaf,max_features,";
  const std::size_t k = result.table.empty() ? 0 : result.table[0].fold_score.size();
  for (std::size_t f = 0; f < k; ++f) out += "fold" + std::to_string(f) + "_" + metric + ",";
  out += "mean_" + metric + "\n";
  for (const auto& row : result.table) {
    out += std::to_string(row.config.n_estimators) + ",";
    out += row.config.max_depth ? std::to_string(*row.config.max_depth) : std::string("none");
    out += "," + std::to_string(row.listed_min_samples_split);
    out += "," + std::to_string(row.config.min_samples_leaf);
    out += "," + max_features_name(row.config.max_features);
    for (double score : row.fold_score) out += "," + format_double(score);
    out += "," + format_double(row.mean_score) + "\n";
  }
  return out;
}

}  // namespace photoscreen::forest
