#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/fsio.hpp"
#include "photoscreen/common/hash.hpp"
#include "photoscreen/forest/grid.hpp"
#include "photoscreen/imaging/cascade.hpp"
#include "photoscreen/inference/metropolis.hpp"

namespace photoscreen::pipeline {

inline constexpr int kSchemaVersion = 1;

struct ForestSettings {
  std::string mode = "grid";  // "grid" | "fixed"
  std::string grid_preset = "paper";  // "paper" | "reduced" | "custom"
  forest::HyperGrid grid;
  forest::ForestConfig fixed;
  forest::CvScoring scoring = forest::CvScoring::f1;
  int cv_folds = 5;
  int runs = 5;
  double train_fraction = 0.7;
  bool save_model = false;  // full versioned serialization of the final model
};

// Effective pipeline configuration. Every command embeds hash() and the seed
// in its outputs so artifacts carry their provenance.
struct PipelineConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out_dir = "out";

  std::filesystem::path participants_path;
  std::filesystem::path posts_path;
  std::filesystem::path ratings_path;  // optional: empty = no ratings
  std::filesystem::path cascade_path;
  std::filesystem::path images_root;
  std::filesystem::path synth_spec_path;  // optional: empty = default spec

  imaging::DetectionParams detection;
  double prior_mean = 0.0;
  double prior_precision = 1e-4;
  inference::McmcConfig mcmc;
  int ppc_replicates = 500;
  ForestSettings forest;

  // canonical serialization of the effective configuration
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir.string();
    j["inputs"] = nlohmann::ordered_json{{"participants", participants_path.string()},
                                         {"posts", posts_path.string()},
                                         {"ratings", ratings_path.string()},
                                         {"cascade", cascade_path.string()},
                                         {"images_root", images_root.string()},
                                         {"synth_spec", synth_spec_path.string()}};
    j["detection"] = nlohmann::ordered_json{
        {"scale_factors", detection.scale_factors},
        {"min_neighbors", detection.min_neighbors},
        {"min_size", std::vector<int>{detection.min_width, detection.min_height}}};
    j["model"] =
        nlohmann::ordered_json{{"prior_mean", prior_mean}, {"prior_precision", prior_precision}};
    j["mcmc"] = nlohmann::ordered_json{{"chains", mcmc.chains},
                                       {"iterations", mcmc.iterations},
                                       {"burn_in", mcmc.burn_in},
                                       {"thin", mcmc.thin}};
    j["ppc"] = nlohmann::ordered_json{{"replicates", ppc_replicates}};

    nlohmann::ordered_json fj;
    fj["mode"] = forest.mode;
    fj["grid_preset"] = forest.grid_preset;
    if (forest.grid_preset == "custom") {
      std::vector<nlohmann::ordered_json> depths;
      for (const auto& d : forest.grid.max_depth) {
        if (d) depths.push_back(*d);
        else depths.push_back(nullptr);
      }
      std::vector<std::string> mfs;
      for (auto mf : forest.grid.max_features) mfs.push_back(forest::max_features_name(mf));
      fj["grid"] = nlohmann::ordered_json{{"n_estimators", forest.grid.n_estimators},
                                          {"max_depth", depths},
                                          {"min_samples_split", forest.grid.min_samples_split},
                                          {"min_samples_leaf", forest.grid.min_samples_leaf},
                                          {"max_features", mfs}};
    }
    fj["fixed"] = forest::config_to_json(forest.fixed);
    fj["scoring"] = forest::cv_scoring_name(forest.scoring);
    fj["cv_folds"] = forest.cv_folds;
    fj["runs"] = forest.runs;
    fj["train_fraction"] = forest.train_fraction;
    fj["save_model"] = forest.save_model;
    j["forest"] = fj;
    return j;
  }

  std::string hash() const { return sha256_hex(to_json().dump()); }

  std::filesystem::path out(const std::string& name) const { return out_dir / name; }
};

namespace detail {

inline forest::ForestConfig parse_fixed_forest(const nlohmann::json& j) {
  forest::ForestConfig c = forest::config_from_json(j);
  c.normalize();
  c.validate();
  return c;
}

inline forest::HyperGrid parse_custom_grid(const nlohmann::json& j) {
  forest::HyperGrid g;
  if (j.contains("n_estimators")) g.n_estimators = j.at("n_estimators").get<std::vector<int>>();
  if (j.contains("max_depth")) {
    g.max_depth.clear();
    for (const auto& d : j.at("max_depth")) {
      if (d.is_null()) g.max_depth.push_back(std::nullopt);
      else g.max_depth.push_back(d.get<int>());
    }
  }
  if (j.contains("min_samples_split")) {
    g.min_samples_split = j.at("min_samples_split").get<std::vector<int>>();
  }
  if (j.contains("min_samples_leaf")) {
    g.min_samples_leaf = j.at("min_samples_leaf").get<std::vector<int>>();
  }
  if (j.contains("max_features")) {
    g.max_features.clear();
    for (const auto& m : j.at("max_features")) {
      const std::string name = m.get<std::string>();
      if (name == "log2") g.max_features.push_back(forest::ForestConfig::MaxFeatures::log2);
      else if (name == "sqrt") g.max_features.push_back(forest::ForestConfig::MaxFeatures::sqrt);
      else if (name == "all") g.max_features.push_back(forest::ForestConfig::MaxFeatures::all);
      else throw ValidationError("config: unknown max_features '" + name + "'");
    }
  }
  g.validate();
  return g;
}

}  // namespace detail

// Loads and validates a configuration file; command-line overrides for seed,
// out_dir, and threads apply before the hash is computed.
inline PipelineConfig load_config(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> seed_override = {},
                                  std::optional<std::string> out_override = {},
                                  std::optional<int> threads_override = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_bytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw ValidationError("config " + path.string() + ": schema_version must be " +
                          std::to_string(kSchemaVersion));
  }

  PipelineConfig c;
  c.seed = j.value("seed", 0ULL);
  c.threads = j.value("threads", 1);
  c.out_dir = j.value("out_dir", "out");
  if (seed_override) c.seed = *seed_override;
  if (out_override) c.out_dir = *out_override;
  if (threads_override) c.threads = *threads_override;

  // relative paths resolve against the config file; the "out:" prefix
  // resolves into the effective output directory so stages can chain
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    if (p.rfind("out:", 0) == 0) return c.out_dir / p.substr(4);
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  if (j.contains("inputs")) {
    const auto& in = j.at("inputs");
    c.participants_path = resolve(in.value("participants", ""));
    c.posts_path = resolve(in.value("posts", ""));
    c.ratings_path = resolve(in.value("ratings", ""));
    c.cascade_path = resolve(in.value("cascade", ""));
    c.images_root = resolve(in.value("images_root", ""));
    c.synth_spec_path = resolve(in.value("synth_spec", ""));
  }

  if (j.contains("detection")) {
    const auto& d = j.at("detection");
    if (d.contains("scale_factors")) {
      c.detection.scale_factors = d.at("scale_factors").get<std::vector<double>>();
    }
    c.detection.min_neighbors = d.value("min_neighbors", 4);
    if (d.contains("min_size")) {
      c.detection.min_width = d.at("min_size")[0].get<int>();
      c.detection.min_height = d.at("min_size")[1].get<int>();
    }
    c.detection.validate();
  }

  if (j.contains("model")) {
    c.prior_mean = j.at("model").value("prior_mean", 0.0);
    c.prior_precision = j.at("model").value("prior_precision", 1e-4);
    if (c.prior_precision <= 0.0) {
      throw ValidationError("config: prior_precision must be > 0");
    }
  }

  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    c.mcmc.chains = m.value("chains", 2);
    c.mcmc.iterations = m.value("iterations", 100000);
    c.mcmc.burn_in = m.value("burn_in", 10000);
    c.mcmc.thin = m.value("thin", 1);
  }
  if (j.contains("ppc")) c.ppc_replicates = j.at("ppc").value("replicates", 500);

  if (j.contains("forest")) {
    const auto& f = j.at("forest");
    c.forest.mode = f.value("mode", "grid");
    if (c.forest.mode != "grid" && c.forest.mode != "fixed") {
      throw ValidationError("config: forest.mode must be 'grid' or 'fixed'");
    }
    if (f.contains("grid") && f.at("grid").is_string()) {
      c.forest.grid_preset = f.at("grid").get<std::string>();
      if (c.forest.grid_preset == "paper") c.forest.grid = forest::HyperGrid::paper();
      else if (c.forest.grid_preset == "reduced") c.forest.grid = forest::HyperGrid::reduced();
      else throw ValidationError("config: unknown grid preset '" + c.forest.grid_preset + "'");
    } else if (f.contains("grid")) {
      c.forest.grid_preset = "custom";
      c.forest.grid = detail::parse_custom_grid(f.at("grid"));
    }
    if (f.contains("fixed")) c.forest.fixed = detail::parse_fixed_forest(f.at("fixed"));
    const std::string scoring = f.value("scoring", "f1");
    if (scoring == "f1") c.forest.scoring = forest::CvScoring::f1;
    else if (scoring == "accuracy") c.forest.scoring = forest::CvScoring::accuracy;
    else throw ValidationError("config: forest.scoring must be 'f1' or 'accuracy'");
    c.forest.cv_folds = f.value("cv_folds", 5);
    c.forest.runs = f.value("runs", 5);
    c.forest.train_fraction = f.value("train_fraction", 0.7);
    c.forest.save_model = f.value("save_model", false);
    if (c.forest.cv_folds < 2) throw ValidationError("config: cv_folds must be >= 2");
    if (c.forest.runs < 1) throw ValidationError("config: runs must be >= 1");
  }

  c.mcmc.seed = c.seed;
  c.mcmc.validate();
  if (c.threads < 1) throw ValidationError("config: threads must be >= 1");
  return c;
}

}  // namespace photoscreen::pipeline
