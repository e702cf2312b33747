#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/common/csv.hpp"
#include "photoscreen/forest/forest.hpp"
#include "photoscreen/forest/metrics.hpp"
#include "photoscreen/forest/split.hpp"

namespace photoscreen::forest {

struct MetricStat {
  std::optional<double> mean;
  std::optional<double> sd;  // sample sd across runs
  int undefined_runs = 0;
};

struct RunReport {
  std::vector<ConfusionMetrics> runs;
  MetricStat recall;
  MetricStat specificity;
  MetricStat precision;
  MetricStat npv;
  MetricStat f1;
  MetricStat accuracy;
};

namespace detail {

inline MetricStat collect(const std::vector<ConfusionMetrics>& runs,
                          std::optional<double> ConfusionMetrics::* member) {
  MetricStat stat;
  std::vector<double> values;
  for (const auto& r : runs) {
    if (r.*member) {
      values.push_back(*(r.*member));
    } else {
      ++stat.undefined_runs;
    }
  }
  if (values.empty()) return stat;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  stat.mean = mean;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    stat.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  } else {
    stat.sd = 0.0;
  }
  return stat;
}

}  // namespace detail

// n_runs independent split / train / evaluate cycles with seeds derived per
// run; reports per-metric mean and sd in the shape of the accuracy table.
inline RunReport repeated_runs(const Mat& x, const std::vector<int>& y,
                               const ForestConfig& config, int n_runs = 5,
                               std::uint64_t seed = 0, double train_fraction = 0.7,
                               int n_threads = 1) {
  if (n_runs < 1) throw ValidationError("repeated_runs: n_runs must be >= 1");
  RunReport report;
  for (int r = 0; r < n_runs; ++r) {
    const TrainTestSplit split =
        split_train_test(y, train_fraction, derive_seed(seed, 2000 + static_cast<std::uint64_t>(r)));
    ForestConfig run_config = config;
    run_config.seed = derive_seed(seed, 3000 + static_cast<std::uint64_t>(r));
    const ForestModel model = train_forest(x, y, run_config, split.train, n_threads);
    const std::vector<int> predicted = model.predict(x, split.test);
    std::vector<int> truth;
    truth.reserve(split.test.size());
    for (std::size_t i : split.test) truth.push_back(y[i]);
    report.runs.push_back(evaluate(truth, predicted));
  }
  report.recall = detail::collect(report.runs, &ConfusionMetrics::recall);
  report.specificity = detail::collect(report.runs, &ConfusionMetrics::specificity);
  report.precision = detail::collect(report.runs, &ConfusionMetrics::precision);
  report.npv = detail::collect(report.runs, &ConfusionMetrics::npv);
  report.f1 = detail::collect(report.runs, &ConfusionMetrics::f1);
  report.accuracy = detail::collect(report.runs, &ConfusionMetrics::accuracy);
  return report;
}

inline nlohmann::ordered_json metric_stat_to_json(const MetricStat& s) {
  nlohmann::ordered_json j;
  if (s.mean) j["mean"] = *s.mean;
  else j["mean"] = nullptr;
  if (s.sd) j["sd"] = *s.sd;
  else j["sd"] = nullptr;
  if (s.undefined_runs > 0) j["undefined_runs"] = s.undefined_runs;
  return j;
}

inline nlohmann::ordered_json run_report_to_json(const RunReport& report) {
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : report.runs) {
    nlohmann::ordered_json j;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    j["tn"] = r.tn;
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (v) j[name] = *v;
      else j[name] = nullptr;
    };
    put("recall", r.recall);
    put("specificity", r.specificity);
    put("precision", r.precision);
    put("npv", r.npv);
    put("f1", r.f1);
    put("accuracy_naive", r.accuracy);
    runs.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["runs"] = std::move(runs);
  j["recall"] = metric_stat_to_json(report.recall);
  j["specificity"] = metric_stat_to_json(report.specificity);
  j["precision"] = metric_stat_to_json(report.precision);
  j["npv"] = metric_stat_to_json(report.npv);
  j["f1"] = metric_stat_to_json(report.f1);
  j["accuracy_naive"] = metric_stat_to_json(report.accuracy);
  j["accuracy_note"] = "naive accuracy is misleading under class imbalance; "
                       "see the per-class metrics";
  return j;
}

}  // namespace photoscreen::forest
