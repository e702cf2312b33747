#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "photoscreen/cohort/admission.hpp"
#include "photoscreen/cohort/aggregate.hpp"
#include "photoscreen/cohort/feature_matrix.hpp"
#include "photoscreen/cohort/io.hpp"
#include "photoscreen/cohort/summary.hpp"
#include "photoscreen/cohort/synth.hpp"
#include "photoscreen/common/fsio.hpp"
#include "photoscreen/common/jsonl.hpp"
#include "photoscreen/forest/grid.hpp"
#include "photoscreen/forest/runs.hpp"
#include "photoscreen/imaging/features.hpp"
#include "photoscreen/inference/marginal.hpp"
#include "photoscreen/inference/metropolis.hpp"
#include "photoscreen/inference/mle.hpp"
#include "photoscreen/inference/posterior.hpp"
#include "photoscreen/inference/ppc.hpp"
#include "photoscreen/pipeline/config.hpp"
#include "photoscreen/stats/agreement.hpp"
#include "photoscreen/stats/chi2.hpp"
#include "photoscreen/stats/correlation.hpp"

namespace photoscreen::pipeline {

// General practitioners' unassisted diagnostic accuracy from the published
// meta-analysis; display-only comparison column, never used in computation.
struct BenchmarkConstants {
  static constexpr double recall = 0.510;
  static constexpr double specificity = 0.813;
  static constexpr double precision = 0.42;
  static constexpr double npv = 0.858;
  static constexpr double f1 = 0.461;
};

// exit codes: 0 ok, 1 data/validation, 2 missing resource, 3 convergence
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitMissing = 2;
inline constexpr int kExitConvergence = 3;

template <typename F>
int run_command(F&& f) {
  try {
    return f();
  } catch (const MissingResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

namespace detail {

inline void stamp(nlohmann::ordered_json& j, const PipelineConfig& config) {
  j["config_hash"] = config.hash();
  j["seed"] = config.seed;
}

struct LoadedCohort {
  std::vector<cohort::Participant> admitted;
  std::vector<cohort::Post> posts;  // posts of admitted participants only
  nlohmann::ordered_json exclusions;
};

// Reads participants and posts, applies the admission rules, and drops the
// posts of excluded participants.
inline LoadedCohort load_admitted(const PipelineConfig& config,
                                  const std::filesystem::path& posts_path) {
  LoadedCohort out;
  const auto participants = cohort::read_participants(config.participants_path);
  const auto posts = cohort::read_posts(posts_path);
  if (posts.empty()) throw ValidationError("posts file is empty: " + posts_path.string());

  std::map<std::string, int> counts;
  for (const auto& p : posts) ++counts[p.participant_id];

  std::set<std::string> admitted_ids;
  nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
  for (const auto& p : participants) {
    const auto result = cohort::admit_participant(p, counts[p.id]);
    if (result.admitted) {
      out.admitted.push_back(p);
      admitted_ids.insert(p.id);
    } else {
      excluded.push_back(nlohmann::ordered_json{
          {"id", p.id}, {"reason", cohort::exclusion_reason_name(result.reason)}});
    }
  }
  out.exclusions = std::move(excluded);
  for (const auto& p : posts) {
    if (admitted_ids.count(p.participant_id)) out.posts.push_back(p);
  }

  bool has_depressed = false, has_healthy = false;
  for (const auto& p : out.admitted) {
    (p.group == cohort::Group::depressed ? has_depressed : has_healthy) = true;
  }
  if (!has_depressed || !has_healthy) {
    throw ValidationError("admission removed every participant of one group");
  }
  return out;
}

// aggregate reads extracted features when the extract stage ran
inline std::filesystem::path effective_posts_path(const PipelineConfig& config) {
  const auto extracted = config.out("posts_features.jsonl");
  if (std::filesystem::exists(extracted)) return extracted;
  return config.posts_path;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline int cmd_synth(const PipelineConfig& config) {
  cohort::CohortSpec spec;
  if (!config.synth_spec_path.empty()) {
    spec = cohort::parse_cohort_spec(nlohmann::json::parse(read_file_bytes(config.synth_spec_path)));
  }
  const cohort::SynthCohort out = cohort::generate_cohort(spec, config.seed);

  atomic_write_file(config.out("participants.jsonl"),
                    to_jsonl(out.participants, cohort::participant_to_json));
  atomic_write_file(config.out("posts.jsonl"), to_jsonl(out.posts, cohort::post_to_json));
  if (!out.ratings.empty()) {
    atomic_write_file(config.out("ratings.jsonl"), to_jsonl(out.ratings, cohort::rating_to_json));
  }
  nlohmann::ordered_json truth = out.ground_truth;
  detail::stamp(truth, config);
  atomic_write_file(config.out("ground_truth.json"), truth.dump(2) + "\n");
  std::cout << "synth: " << out.participants.size() << " participants, " << out.posts.size()
            << " posts, " << out.ratings.size() << " ratings\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

inline int cmd_extract(const PipelineConfig& config) {
  if (config.cascade_path.empty() || !std::filesystem::exists(config.cascade_path)) {
    throw MissingResourceError("cascade file not found: " + config.cascade_path.string());
  }
  const imaging::CascadeModel cascade = imaging::load_cascade(config.cascade_path.string());
  auto posts = cohort::read_posts(config.posts_path);

  // per-photo work is independent; results land by index so the output order
  // (and bytes) never depend on the worker count
  std::vector<std::string> post_errors(posts.size());
  std::atomic<std::size_t> failed{0}, computed{0}, carried{0};
  auto process = [&](std::size_t i) {
    cohort::Post& post = posts[i];
    if (post.features && !post.image_path) {
      ++carried;  // synthetic cohorts ship features without pixels
      return;
    }
    if (!post.image_path) {
      ++failed;
      post_errors[i] = nlohmann::ordered_json{
          {"post_id", post.id}, {"error", "no image path and no precomputed features"}}
                           .dump();
      return;
    }
    const auto path = config.images_root.empty()
                          ? std::filesystem::path(*post.image_path)
                          : config.images_root / *post.image_path;
    try {
      const imaging::RgbImage img = imaging::decode_image_file(path.string());
      post.features = imaging::extract_features(img, cascade, config.detection);
      ++computed;
    } catch (const Error& e) {
      ++failed;
      post_errors[i] = nlohmann::ordered_json{
          {"post_id", post.id}, {"image_path", path.string()}, {"error", e.what()}}
                           .dump();
    }
  };
  if (config.threads <= 1) {
    for (std::size_t i = 0; i < posts.size(); ++i) process(i);
  } else {
    std::vector<std::thread> workers;
    const int n = std::min<int>(config.threads, static_cast<int>(posts.size()));
    for (int w = 0; w < n; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = static_cast<std::size_t>(w); i < posts.size(); i += n) process(i);
      });
    }
    for (auto& worker : workers) worker.join();
  }

  std::string errors;
  for (const auto& e : post_errors) {
    if (!e.empty()) errors += e + "\n";
  }
  atomic_write_file(config.out("posts_features.jsonl"), to_jsonl(posts, cohort::post_to_json));
  atomic_write_file(config.out("extract_errors.jsonl"), errors);
  std::cout << "extract: " << computed << " computed, " << carried << " carried, " << failed
            << " failed\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// aggregate
// ---------------------------------------------------------------------------

inline int cmd_aggregate(const PipelineConfig& config) {
  const auto loaded = detail::load_admitted(config, detail::effective_posts_path(config));

  // attach per-post rating means when a ratings file is configured
  std::map<std::string, cohort::PostRatings> post_ratings;
  std::vector<cohort::Rating> ratings;
  if (!config.ratings_path.empty() && std::filesystem::exists(config.ratings_path)) {
    ratings = cohort::read_ratings(config.ratings_path);
    const auto agg = cohort::aggregate_ratings(ratings);
    post_ratings = agg.means;
  }

  const auto result = cohort::aggregate_user_days(loaded.posts, loaded.admitted, post_ratings);
  const auto pre_days = cohort::split_pre_diagnosis(result.user_days, loaded.admitted);

  const auto all_matrix = cohort::feature_matrix_from_user_days(result.user_days);
  const auto pre_matrix = cohort::feature_matrix_from_user_days(pre_days);
  atomic_write_file(config.out("all_data.csv"), cohort::feature_matrix_to_csv(all_matrix));
  atomic_write_file(config.out("pre_diagnosis.csv"), cohort::feature_matrix_to_csv(pre_matrix));

  const auto ratings_matrix = cohort::rating_matrix_from_user_days(result.user_days);
  if (ratings_matrix.rows() > 0) {
    atomic_write_file(config.out("ratings_all.csv"),
                      cohort::feature_matrix_to_csv(ratings_matrix));
  }

  nlohmann::ordered_json summary =
      cohort::summary_to_json(cohort::summary_stats(loaded.admitted, loaded.posts));
  summary["observations"] = nlohmann::ordered_json{
      {"all_data", all_matrix.rows()}, {"pre_diagnosis", pre_matrix.rows()},
      {"ratings", ratings_matrix.rows()}};
  {
    long dep_all = 0, dep_pre = 0;
    for (int t : all_matrix.target) dep_all += t;
    for (int t : pre_matrix.target) dep_pre += t;
    summary["depressed_share"] = nlohmann::ordered_json{
        {"all_data", all_matrix.rows() ? static_cast<double>(dep_all) / all_matrix.rows() : 0.0},
        {"pre_diagnosis",
         pre_matrix.rows() ? static_cast<double>(dep_pre) / pre_matrix.rows() : 0.0}};
  }
  summary["excluded_participants"] = loaded.exclusions;
  summary["skipped_posts"] = result.skipped_posts;
  detail::stamp(summary, config);
  atomic_write_file(config.out("summary_stats.json"), summary.dump(2) + "\n");

  // correlation matrices for both computational datasets and, when ratings
  // exist, the ratings-vs-computational block
  nlohmann::ordered_json correlations;
  auto emit_corr = [&](const cohort::FeatureMatrix& m, const std::string& name) {
    if (m.rows() < 3) return;
    const auto corr = stats::correlation_matrix(m.values, m.feature_names);
    atomic_write_file(config.out("correlations_" + name + ".csv"), corr.to_csv());
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 1; i < corr.labels.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        rows.push_back(nlohmann::ordered_json{
            {"a", corr.labels[i]}, {"b", corr.labels[j]}, {"r", corr.r(i, j)}});
      }
    }
    correlations[name] = rows;
  };
  emit_corr(all_matrix, "all");
  emit_corr(pre_matrix, "pre");
  if (ratings_matrix.rows() >= 3) {
    // combined matrix: rating categories plus computational features on the
    // user-days that carry ratings
    cohort::FeatureMatrix combined;
    combined.feature_names = ratings_matrix.feature_names;
    for (const auto& n : all_matrix.feature_names) combined.feature_names.push_back(n);
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < all_matrix.observation_ids.size(); ++i) {
      row_of[all_matrix.observation_ids[i]] = i;
    }
    combined.values = Mat(ratings_matrix.rows(), combined.feature_names.size());
    combined.target = ratings_matrix.target;
    combined.observation_ids = ratings_matrix.observation_ids;
    for (std::size_t i = 0; i < ratings_matrix.rows(); ++i) {
      for (std::size_t j = 0; j < ratings_matrix.cols(); ++j) {
        combined.values(i, j) = ratings_matrix.values(i, j);
      }
      const std::size_t src = row_of.at(ratings_matrix.observation_ids[i]);
      for (std::size_t j = 0; j < all_matrix.cols(); ++j) {
        combined.values(i, ratings_matrix.cols() + j) = all_matrix.values(src, j);
      }
    }
    emit_corr(combined, "ratings");
  }
  if (!correlations.empty()) {
    detail::stamp(correlations, config);
    atomic_write_file(config.out("correlations.json"), correlations.dump(2) + "\n");
  }

  if (!ratings.empty()) {
    const auto agreement = stats::interrater_agreement(ratings, 5, config.seed);
    nlohmann::ordered_json aj;
    aj["r"] = nlohmann::ordered_json{{"happy", agreement.happy},
                                     {"sad", agreement.sad},
                                     {"likable", agreement.likable},
                                     {"interesting", agreement.interesting}};
    aj["p"] = nlohmann::ordered_json{{"happy", agreement.happy_p},
                                     {"sad", agreement.sad_p},
                                     {"likable", agreement.likable_p},
                                     {"interesting", agreement.interesting_p}};
    aj["photos_included"] = agreement.photos_included;
    aj["photos_excluded"] = agreement.photos_excluded;
    aj["folds"] = agreement.folds;
    detail::stamp(aj, config);
    atomic_write_file(config.out("agreement.json"), aj.dump(2) + "\n");
  }

  std::cout << "aggregate: " << all_matrix.rows() << " all-data observations, "
            << pre_matrix.rows() << " pre-diagnosis\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

namespace detail {

inline std::filesystem::path dataset_csv(const PipelineConfig& config,
                                         const std::string& dataset) {
  if (dataset == "all") return config.out("all_data.csv");
  if (dataset == "pre") return config.out("pre_diagnosis.csv");
  if (dataset == "ratings") return config.out("ratings_all.csv");
  throw ValidationError("unknown dataset '" + dataset + "' (expected all|pre|ratings)");
}

inline nlohmann::ordered_json freq_fit_to_json(const inference::FreqFit& fit) {
  nlohmann::ordered_json coefs;
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    coefs[fit.names[j]] = nlohmann::ordered_json{
        {"coef", fit.coef[j]}, {"std_err", fit.std_err[j]},   {"z", fit.z[j]},
        {"p", fit.p[j]},       {"ci_lo", fit.ci_lo[j]},       {"ci_hi", fit.ci_hi[j]}};
  }
  nlohmann::ordered_json j;
  j["coef"] = coefs;
  j["n_obs"] = fit.n_obs;
  j["log_likelihood"] = fit.log_likelihood;
  j["null_log_likelihood"] = fit.null_log_likelihood;
  j["pseudo_r2"] = fit.pseudo_r2;
  if (fit.llr_p) j["llr_p"] = *fit.llr_p;
  else j["llr_p"] = nullptr;
  j["converged"] = fit.converged;
  if (!fit.warning.empty()) j["warning"] = fit.warning;
  return j;
}

}  // namespace detail

inline int cmd_fit(const PipelineConfig& config, const std::string& dataset) {
  const auto csv_path = detail::dataset_csv(config, dataset);
  if (!std::filesystem::exists(csv_path)) {
    throw MissingResourceError("feature matrix not found: " + csv_path.string() +
                               " (run aggregate first)");
  }
  const auto matrix = cohort::feature_matrix_from_csv(read_file_bytes(csv_path));
  const auto standardized = cohort::standardize(matrix);
  const auto design = inference::build_design(standardized);

  const inference::LogitSpec spec = [&] {
    inference::LogitSpec s = inference::LogitSpec::diffuse(design.names, config.prior_precision);
    for (auto& m : s.prior_mean) m = config.prior_mean;
    return s;
  }();

  const inference::FreqFit freq = inference::fit_logit_mle(design);

  inference::McmcConfig mcmc = config.mcmc;
  mcmc.seed = config.seed;
  const auto chains = inference::run_metropolis(design.x, design.y, spec, mcmc, config.threads);
  const auto summary = inference::summarize_posterior(chains, design.names);

  const double log_m_full = inference::log_marginal_laplace(design.x, design.y, spec);
  const auto null_design = inference::intercept_only_design(design.y);
  const inference::LogitSpec null_spec = [&] {
    inference::LogitSpec s =
        inference::LogitSpec::diffuse(null_design.names, config.prior_precision);
    for (auto& m : s.prior_mean) m = config.prior_mean;
    return s;
  }();
  const double log_m_null =
      inference::log_marginal_laplace(null_design.x, null_design.y, null_spec);
  const auto bf = inference::bayes_factor(log_m_full, log_m_null);

  const double ppc = inference::posterior_predictive_pvalue(
      chains, design.x, design.y, config.ppc_replicates, derive_seed(config.seed, 77));

  // draws: one column per parameter, chains concatenated in order
  {
    std::string csv;
    for (std::size_t j = 0; j < design.names.size(); ++j) {
      if (j) csv += ',';
      csv += design.names[j];
    }
    csv += '\n';
    for (const auto& chain : chains) {
      for (std::size_t i = 0; i < chain.draws.rows; ++i) {
        for (std::size_t j = 0; j < chain.draws.cols; ++j) {
          if (j) csv += ',';
          csv += format_double(chain.draws(i, j));
        }
        csv += '\n';
      }
    }
    atomic_write_file(config.out("draws_" + dataset + ".csv"), csv);
  }

  double rhat_max = 0.0;
  for (const auto& p : summary.params) rhat_max = std::max(rhat_max, p.rhat);

  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  detail::stamp(j, config);
  j["n_obs"] = matrix.rows();
  j["features"] = matrix.feature_names;
  {
    nlohmann::ordered_json stz;
    for (std::size_t k = 0; k < matrix.feature_names.size(); ++k) {
      stz[matrix.feature_names[k]] =
          nlohmann::ordered_json{{"mean", standardized.standardization->mean[k]},
                                 {"sd", standardized.standardization->sd[k]}};
    }
    j["standardization"] = stz;
  }
  j["frequentist"] = detail::freq_fit_to_json(freq);
  j["bayesian"] = inference::posterior_summary_to_json(summary);
  j["bayes_factor"] = nlohmann::ordered_json{{"K", bf.k},
                                             {"log10_K", (log_m_full - log_m_null) / std::log(10.0)},
                                             {"label", bf.label},
                                             {"log_marginal_full", log_m_full},
                                             {"log_marginal_null", log_m_null}};
  j["ppc_p"] = ppc;
  j["rhat_max"] = rhat_max;
  j["mcmc"] = nlohmann::ordered_json{{"chains", mcmc.chains},
                                     {"iterations", mcmc.iterations},
                                     {"burn_in", mcmc.burn_in},
                                     {"thin", mcmc.thin},
                                     {"acceptance_rate", summary.acceptance_rate}};
  atomic_write_file(config.out("fit_" + dataset + ".json"), j.dump(2) + "\n");

  std::cout << "fit " << dataset << ": K=" << bf.k << " (" << bf.label << "), ppc_p=" << ppc
            << ", max rhat=" << rhat_max << "\n";
  if (rhat_max > 1.1) {
    std::cerr << "error: chains did not converge (max rhat " << rhat_max << ")\n";
    return kExitConvergence;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

inline int cmd_classify(const PipelineConfig& config, const std::string& dataset) {
  if (dataset != "all" && dataset != "pre") {
    throw ValidationError("unknown dataset '" + dataset + "' (expected all|pre)");
  }
  const auto csv_path = detail::dataset_csv(config, dataset);
  if (!std::filesystem::exists(csv_path)) {
    throw MissingResourceError("feature matrix not found: " + csv_path.string() +
                               " (run aggregate first)");
  }
  const auto matrix = cohort::feature_matrix_from_csv(read_file_bytes(csv_path));

  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  detail::stamp(j, config);
  j["mode"] = config.forest.mode;

  forest::ForestConfig chosen = config.forest.fixed;
  if (config.forest.mode == "grid") {
    const auto result =
        forest::grid_search(matrix.values, matrix.target, config.forest.grid,
                            config.forest.cv_folds, config.seed, config.threads,
                            config.forest.scoring);
    atomic_write_file(config.out("cv_table_" + dataset + ".csv"),
                      forest::cv_table_to_csv(result));
    chosen = result.best;
    j["grid_rows"] = result.table.size();
    j["grid_scoring"] = forest::cv_scoring_name(result.scoring);
    j["grid_warnings"] = result.warnings;
  }
  j["chosen_config"] = forest::config_to_json(chosen);

  const auto report = forest::repeated_runs(matrix.values, matrix.target, chosen,
                                            config.forest.runs, config.seed,
                                            config.forest.train_fraction, config.threads);
  j["run_report"] = forest::run_report_to_json(report);

  // run-level metrics as CSV alongside the JSON report
  {
    std::string csv = "run,tp,fp,fn,tn,recall,specificity,precision,npv,f1,accuracy_naive\n";
    auto cell = [](const std::optional<double>& v) {
      return v ? format_double(*v) : std::string("undefined");
    };
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
      const auto& m = report.runs[r];
      csv += std::to_string(r) + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
             std::to_string(m.fn) + "," + std::to_string(m.tn) + "," + cell(m.recall) + "," +
             cell(m.specificity) + "," + cell(m.precision) + "," + cell(m.npv) + "," +
             cell(m.f1) + "," + cell(m.accuracy) + "\n";
    }
    atomic_write_file(config.out("runs_" + dataset + ".csv"), csv);
  }

  // final model on a fresh split: summary always, full serialization on request
  {
    const auto split = forest::split_train_test(matrix.target, config.forest.train_fraction,
                                                derive_seed(config.seed, 4000));
    forest::ForestConfig final_config = chosen;
    final_config.seed = derive_seed(config.seed, 4001);
    forest::ForestModel model = forest::train_forest(matrix.values, matrix.target, final_config,
                                                     split.train, config.threads);
    model.feature_names = matrix.feature_names;
    j["model_summary"] = forest::model_summary_json(model);
    if (config.forest.save_model) {
      atomic_write_file(config.out("forest_" + dataset + ".json"),
                        forest::serialize_forest(model) + "\n");
    }
  }
  j["benchmark_mvr"] = nlohmann::ordered_json{{"recall", BenchmarkConstants::recall},
                                              {"specificity", BenchmarkConstants::specificity},
                                              {"precision", BenchmarkConstants::precision},
                                              {"npv", BenchmarkConstants::npv},
                                              {"f1", BenchmarkConstants::f1},
                                              {"note", "display-only comparison column"}};
  atomic_write_file(config.out("classify_" + dataset + ".json"), j.dump(2) + "\n");

  std::cout << "classify " << dataset << ": mean F1="
            << (report.f1.mean ? std::to_string(*report.f1.mean) : std::string("undefined"))
            << " over " << report.runs.size() << " runs\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// filters
// ---------------------------------------------------------------------------

namespace detail {

inline stats::ContingencyTable filter_table(const std::vector<cohort::Post>& posts,
                                            const std::map<std::string, cohort::Group>& group_of) {
  std::set<std::string> names;
  for (const auto& p : posts) names.insert(p.filter_name);
  stats::ContingencyTable table;
  table.row_labels.assign(names.begin(), names.end());
  table.col_labels = {"depressed", "healthy"};
  table.observed = Mat(table.row_labels.size(), 2);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < table.row_labels.size(); ++i) row_of[table.row_labels[i]] = i;
  for (const auto& p : posts) {
    const std::size_t col = group_of.at(p.participant_id) == cohort::Group::depressed ? 0 : 1;
    table.observed(row_of.at(p.filter_name), col) += 1.0;
  }
  return table;
}

}  // namespace detail

inline int cmd_filters(const PipelineConfig& config) {
  const auto loaded = detail::load_admitted(config, detail::effective_posts_path(config));
  std::map<std::string, cohort::Group> group_of;
  std::map<std::string, cohort::Date> diagnosis;
  for (const auto& p : loaded.admitted) {
    group_of[p.id] = p.group;
    if (p.diagnosis_date) diagnosis[p.id] = *p.diagnosis_date;
  }

  std::vector<cohort::Post> pre_posts;
  for (const auto& p : loaded.posts) {
    if (group_of.at(p.participant_id) == cohort::Group::healthy ||
        p.date() < diagnosis.at(p.participant_id)) {
      pre_posts.push_back(p);
    }
  }

  nlohmann::ordered_json j;
  detail::stamp(j, config);
  auto analyze = [&](const std::vector<cohort::Post>& posts, const std::string& name) {
    const auto table = detail::filter_table(posts, group_of);
    const auto result = stats::chi2_independence(table);
    atomic_write_file(config.out("filters_" + name + ".csv"),
                      stats::chi2_differences_csv(table, result));
    j[name] = nlohmann::ordered_json{{"chi2", result.chi2},
                                     {"df", result.df},
                                     {"p", result.p},
                                     {"posts", posts.size()},
                                     {"filters", table.row_labels.size()}};
  };
  analyze(loaded.posts, "all");
  analyze(pre_posts, "pre");
  atomic_write_file(config.out("filters.json"), j.dump(2) + "\n");

  std::cout << "filters: all chi2=" << j["all"]["chi2"].get<double>()
            << ", pre chi2=" << j["pre"]["chi2"].get<double>() << "\n";
  return kExitOk;
}

}  // namespace photoscreen::pipeline
