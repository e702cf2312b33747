#include <optional>
#include <string>

#include <CLI11.hpp>

#include "photoscreen/pipeline/commands.hpp"
#include "photoscreen/pipeline/report.hpp"

namespace ps = photoscreen::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"photoscreen: depression screening analytics over photo metadata"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  app.add_option("--config", config_path, "pipeline configuration file")->required();
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", out_dir, "override the configured output directory");
  app.add_option("--threads", threads, "override the configured worker count");

  auto* synth = app.add_subcommand("synth", "generate a synthetic cohort");
  auto* extract = app.add_subcommand("extract", "extract photo features");
  auto* aggregate = app.add_subcommand("aggregate", "build user-day datasets");

  auto* fit = app.add_subcommand("fit", "Bayesian + frequentist logistic regression");
  std::string fit_dataset = "all";
  fit->add_option("--dataset", fit_dataset, "all|pre|ratings")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "random-forest classification");
  std::string classify_dataset = "all";
  classify->add_option("--dataset", classify_dataset, "all|pre")->capture_default_str();

  auto* filters = app.add_subcommand("filters", "filter-usage chi-squared analysis");
  auto* report = app.add_subcommand("report", "assemble the full report bundle");

  CLI11_PARSE(app, argc, argv);

  return ps::run_command([&]() -> int {
    const ps::PipelineConfig config = ps::load_config(config_path, seed, out_dir, threads);
    if (synth->parsed()) return ps::cmd_synth(config);
    if (extract->parsed()) return ps::cmd_extract(config);
    if (aggregate->parsed()) return ps::cmd_aggregate(config);
    if (fit->parsed()) return ps::cmd_fit(config, fit_dataset);
    if (classify->parsed()) return ps::cmd_classify(config, classify_dataset);
    if (filters->parsed()) return ps::cmd_filters(config);
    if (report->parsed()) return ps::cmd_report(config);
    return 1;
  });
}
