#pragma once

#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "photoscreen/forest/tree.hpp"

namespace photoscreen::forest {

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  std::vector<std::vector<std::size_t>> oob_rows;  // per tree
  std::vector<std::string> feature_names;

  int predict_row(const Mat& x, std::size_t row) const {
    int votes1 = 0;
    for (const auto& tree : trees) votes1 += tree.predict_row(x, row);
    const int votes0 = static_cast<int>(trees.size()) - votes1;
    return votes1 > votes0 ? 1 : 0;  // ties -> healthy
  }

  std::vector<int> predict(const Mat& x) const {
    std::vector<int> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x, i);
    return out;
  }

  std::vector<int> predict(const Mat& x, const std::vector<std::size_t>& rows) const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(predict_row(x, r));
    return out;
  }
};

// Bags config.n_estimators trees. Each tree draws its bootstrap sample and
// per-node feature subsets from an RNG seeded by (config.seed, tree index),
// so training parallelizes without changing results.
inline ForestModel train_forest(const Mat& x, const std::vector<int>& y,
                                const ForestConfig& config,
                                const std::vector<std::size_t>& train_rows, int n_threads = 1) {
  config.validate();
  if (train_rows.empty()) throw ValidationError("train_forest: no training rows");
  bool has0 = false, has1 = false;
  for (std::size_t r : train_rows) {
    if (y[r] != 0 && y[r] != 1) throw ValidationError("train_forest: labels must be 0/1");
    (y[r] ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw ValidationError("train_forest: both classes must be present");

  ForestModel model;
  model.config = config;
  model.trees.resize(config.n_estimators);
  model.oob_rows.resize(config.n_estimators);

  auto build = [&](int t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> sample;
    if (config.bootstrap) {
      const std::size_t n = train_rows.size();
      sample.resize(n);
      std::vector<bool> picked(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(n));
        sample[i] = train_rows[j];
        picked[j] = true;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!picked[i]) model.oob_rows[t].push_back(train_rows[i]);
      }
    } else {
      sample = train_rows;
    }
    model.trees[t] = train_tree(x, y, config, sample, rng);
  };

  if (n_threads <= 1 || config.n_estimators == 1) {
    for (int t = 0; t < config.n_estimators; ++t) build(t);
  } else {
    std::vector<std::thread> workers;
    const int workers_n = std::min(n_threads, config.n_estimators);
    for (int w = 0; w < workers_n; ++w) {
      workers.emplace_back([&, w] {
        for (int t = w; t < config.n_estimators; t += workers_n) build(t);
      });
    }
    for (auto& worker : workers) worker.join();
  }
  return model;
}

inline ForestModel train_forest(const Mat& x, const std::vector<int>& y,
                                const ForestConfig& config, int n_threads = 1) {
  std::vector<std::size_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), 0);
  return train_forest(x, y, config, rows, n_threads);
}

inline nlohmann::ordered_json config_to_json(const ForestConfig& c) {
  nlohmann::ordered_json j;
  j["n_estimators"] = c.n_estimators;
  if (c.max_depth) {
    j["max_depth"] = *c.max_depth;
  } else {
    j["max_depth"] = nullptr;
  }
  j["min_samples_split"] = c.min_samples_split;
  j["min_samples_leaf"] = c.min_samples_leaf;
  j["max_features"] = max_features_name(c.max_features);
  j["seed"] = c.seed;
  return j;
}

inline ForestConfig config_from_json(const nlohmann::json& j) {
  ForestConfig c;
  c.n_estimators = j.at("n_estimators").get<int>();
  if (j.contains("max_depth") && !j.at("max_depth").is_null()) {
    c.max_depth = j.at("max_depth").get<int>();
  }
  c.min_samples_split = j.at("min_samples_split").get<int>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  const std::string mf = j.value("max_features", "sqrt");
  if (mf == "log2") c.max_features = ForestConfig::MaxFeatures::log2;
  else if (mf == "sqrt") c.max_features = ForestConfig::MaxFeatures::sqrt;
  else if (mf == "all") c.max_features = ForestConfig::MaxFeatures::all;
  else throw ValidationError("unknown max_features '" + mf + "'");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("bootstrap")) c.bootstrap = j.at("bootstrap").get<bool>();
  return c;
}

// Summary only: hyperparameters, sizes, per-feature split counts.
inline nlohmann::ordered_json model_summary_json(const ForestModel& m) {
  std::map<int, long> split_counts;
  long total_nodes = 0;
  for (const auto& tree : m.trees) {
    total_nodes += static_cast<long>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (!node.leaf) ++split_counts[node.feature];
    }
  }
  nlohmann::ordered_json splits;
  for (const auto& [feature, count] : split_counts) {
    const std::string name = feature < static_cast<int>(m.feature_names.size())
                                 ? m.feature_names[feature]
                                 : "f" + std::to_string(feature);
    splits[name] = count;
  }
  nlohmann::ordered_json j;
  j["config"] = config_to_json(m.config);
  j["trees"] = m.trees.size();
  j["total_nodes"] = total_nodes;
  j["split_counts"] = splits;
  return j;
}

// Versioned full-model serialization for reload.
inline std::string serialize_forest(const ForestModel& m) {
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& tree : m.trees) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back(nlohmann::ordered_json::array(
          {n.leaf, n.feature, n.threshold, n.left, n.right, n.counts[0], n.counts[1]}));
    }
    trees.push_back(std::move(nodes));
  }
  nlohmann::ordered_json j;
  j["format"] = "photoscreen-forest";
  j["version"] = 1;
  j["config"] = config_to_json(m.config);
  j["feature_names"] = m.feature_names;
  j["trees"] = std::move(trees);
  return j.dump();
}

inline ForestModel parse_forest(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "photoscreen-forest" || j.value("version", 0) != 1) {
    throw ValidationError("not a version-1 photoscreen forest file");
  }
  ForestModel m;
  m.config = config_from_json(j.at("config"));
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& tj : j.at("trees")) {
    DecisionTree tree;
    for (const auto& nj : tj) {
      DecisionTree::Node n;
      n.leaf = nj[0].get<bool>();
      n.feature = nj[1].get<int>();
      n.threshold = nj[2].get<double>();
      n.left = nj[3].get<int>();
      n.right = nj[4].get<int>();
      n.counts = {nj[5].get<long>(), nj[6].get<long>()};
      tree.nodes.push_back(n);
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace photoscreen::forest
