#pragma once

#include <algorithm>
#include <vector>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/rng.hpp"

namespace photoscreen::forest {

// Stratified k folds: per class, a seeded shuffle dealt round-robin, so every
// fold's class proportion sits within one member of the global proportion.
inline std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& y, int k,
                                                              std::uint64_t seed) {
  if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
  std::vector<std::vector<std::size_t>> folds(k);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) indices.push_back(i);
    }
    if (static_cast<int>(indices.size()) < k) {
      throw ValidationError("stratified_kfold: class " + std::to_string(cls) +
                            " has fewer members than folds");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(indices);
    for (std::size_t t = 0; t < indices.size(); ++t) {
      folds[t % k].push_back(indices[t]);
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified holdout split at the given training fraction.
inline TrainTestSplit split_train_test(const std::vector<int>& y, double fraction,
                                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split_train_test: fraction must be in (0,1)");
  }
  TrainTestSplit split;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) indices.push_back(i);
    }
    if (indices.size() < 2) {
      throw ValidationError("split_train_test: class " + std::to_string(cls) +
                            " needs at least 2 members");
    }
    Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(cls)));
    rng.shuffle(indices);
    std::size_t n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(indices.size())));
    n_train = std::max<std::size_t>(1, std::min(n_train, indices.size() - 1));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      (i < n_train ? split.train : split.test).push_back(indices[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace photoscreen::forest
