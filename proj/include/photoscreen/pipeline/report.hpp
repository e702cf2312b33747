#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "photoscreen/pipeline/commands.hpp"

namespace photoscreen::pipeline {

namespace detail {

inline std::optional<nlohmann::ordered_json> try_load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  return nlohmann::ordered_json::parse(read_file_bytes(path));
}

inline std::string fmt(double v, int prec = 3) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline void render_fit_section(std::string& text, const nlohmann::ordered_json& fit,
                               const std::string& title) {
  text += title + " (N=" + std::to_string(fit.at("n_obs").get<long>()) + ")\n";
  text += pad("", 14) + pad("Coef mu (sd)", 22) + pad("HPD level", 11) + pad("HPD interval", 22) +
          "Odds\n";
  const auto& coefs = fit.at("bayesian").at("coef");
  for (auto it = coefs.begin(); it != coefs.end(); ++it) {
    const auto& c = it.value();
    const auto& hpd = c.at("hpd");
    const std::string level =
        hpd.at("level").is_null() ? "none" : fmt(hpd.at("level").get<double>() * 100.0, 0) + "%";
    text += pad(it.key(), 14) +
            pad(fmt(c.at("mean").get<double>()) + " (" + fmt(c.at("sd").get<double>()) + ")", 22) +
            pad(level, 11) +
            pad(fmt(hpd.at("lo").get<double>()) + " .. " + fmt(hpd.at("hi").get<double>()), 22) +
            fmt(c.at("odds").get<double>()) + "\n";
  }
  const auto& bf = fit.at("bayes_factor");
  // K overflows to infinity (serialized null) for overwhelming evidence
  const std::string k_text = bf.at("K").is_null()
                                 ? "10^" + fmt(bf.at("log10_K").get<double>(), 1)
                                 : fmt(bf.at("K").get<double>(), 2);
  text += "  Bayes factor vs null: K=" + k_text + " (" + bf.at("label").get<std::string>() +
          "), ppc p=" + fmt(fit.at("ppc_p").get<double>()) +
          ", max rhat=" + fmt(fit.at("rhat_max").get<double>(), 4) + "\n\n";
}

inline void render_freq_section(std::string& text, const nlohmann::ordered_json& fit,
                                const std::string& title) {
  const auto& f = fit.at("frequentist");
  text += title + " | MLE logit | LL=" + fmt(f.at("log_likelihood").get<double>(), 1) +
          " LL-null=" + fmt(f.at("null_log_likelihood").get<double>(), 1) +
          " pseudo-R2=" + fmt(f.at("pseudo_r2").get<double>(), 5) + " converged=" +
          (f.at("converged").get<bool>() ? "yes" : "no") + "\n";
  text += pad("", 14) + pad("coef", 10) + pad("std err", 10) + pad("z", 9) + pad("P>|z|", 8) +
          "[95% CI]\n";
  const auto& coefs = f.at("coef");
  for (auto it = coefs.begin(); it != coefs.end(); ++it) {
    const auto& c = it.value();
    text += pad(it.key(), 14) + pad(fmt(c.at("coef").get<double>(), 4), 10) +
            pad(fmt(c.at("std_err").get<double>(), 4), 10) +
            pad(fmt(c.at("z").get<double>(), 2), 9) + pad(fmt(c.at("p").get<double>()), 8) +
            fmt(c.at("ci_lo").get<double>(), 3) + " .. " + fmt(c.at("ci_hi").get<double>(), 3) +
            "\n";
  }
  text += "\n";
}

inline std::string stat_cell(const nlohmann::ordered_json& stat) {
  if (stat.at("mean").is_null()) return "undefined";
  return fmt(stat.at("mean").get<double>()) + " (" + fmt(stat.at("sd").get<double>()) + ")";
}

}  // namespace detail

// Assembles every produced artifact into one bundle. Missing artifacts
// degrade to warnings, never failures.
inline int cmd_report(const PipelineConfig& config) {
  nlohmann::ordered_json bundle;
  detail::stamp(bundle, config);
  std::vector<std::string> warnings;
  std::vector<std::string> sections;

  auto section = [&](const char* name, const std::filesystem::path& path)
      -> std::optional<nlohmann::ordered_json> {
    auto j = detail::try_load(path);
    if (!j) {
      warnings.push_back(std::string("missing section '") + name + "': " + path.string() +
                         " not found");
      bundle[name] = nullptr;
      return std::nullopt;
    }
    sections.push_back(name);
    bundle[name] = *j;
    return j;
  };

  const auto summary = section("dataset_summary", config.out("summary_stats.json"));

  // bayesian summaries per dataset
  nlohmann::ordered_json bayesian;
  nlohmann::ordered_json frequentist;
  nlohmann::ordered_json bayes_factors;
  bool any_fit = false;
  for (const std::string ds : {"all", "pre", "ratings"}) {
    const auto fit = detail::try_load(config.out("fit_" + ds + ".json"));
    if (!fit) {
      if (ds != "ratings") {
        warnings.push_back("missing fit for dataset '" + ds + "'");
      }
      continue;
    }
    any_fit = true;
    bayesian[ds] = nlohmann::ordered_json{{"coef", fit->at("bayesian").at("coef")},
                                          {"n_obs", fit->at("n_obs")},
                                          {"ppc_p", fit->at("ppc_p")},
                                          {"rhat_max", fit->at("rhat_max")},
                                          {"config_hash", fit->at("config_hash")},
                                          {"seed", fit->at("seed")}};
    frequentist[ds] = fit->at("frequentist");
    frequentist[ds]["config_hash"] = fit->at("config_hash");
    frequentist[ds]["seed"] = fit->at("seed");
    bayes_factors[ds] = fit->at("bayes_factor");
    bayes_factors[ds]["config_hash"] = fit->at("config_hash");
    bayes_factors[ds]["seed"] = fit->at("seed");
  }
  if (any_fit) {
    bundle["bayesian"] = bayesian;
    bundle["frequentist"] = frequentist;
    bundle["bayes_factors"] = bayes_factors;
    sections.push_back("bayesian");
    sections.push_back("frequentist");
    sections.push_back("bayes_factors");
  } else {
    bundle["bayesian"] = nullptr;
    bundle["frequentist"] = nullptr;
    bundle["bayes_factors"] = nullptr;
  }

  nlohmann::ordered_json classifier;
  bool any_classify = false;
  for (const std::string ds : {"all", "pre"}) {
    const auto cj = detail::try_load(config.out("classify_" + ds + ".json"));
    if (!cj) {
      warnings.push_back("missing classifier output for dataset '" + ds + "'");
      continue;
    }
    any_classify = true;
    classifier[ds] = *cj;
  }
  if (any_classify) {
    classifier["benchmark_mvr"] =
        nlohmann::ordered_json{{"recall", BenchmarkConstants::recall},
                               {"specificity", BenchmarkConstants::specificity},
                               {"precision", BenchmarkConstants::precision},
                               {"npv", BenchmarkConstants::npv},
                               {"f1", BenchmarkConstants::f1}};
    bundle["classifier"] = classifier;
    sections.push_back("classifier");
  } else {
    bundle["classifier"] = nullptr;
  }

  section("chi_squared", config.out("filters.json"));
  section("correlations", config.out("correlations.json"));
  section("agreement", config.out("agreement.json"));

  bundle["sections_present"] = sections;
  bundle["warnings"] = warnings;
  atomic_write_file(config.out("report.json"), bundle.dump(2) + "\n");

  // ------------------------------------------------------------------
  // human-readable rendering
  // ------------------------------------------------------------------
  std::string text;
  text += "photoscreen report\n";
  text += "config " + config.hash() + ", seed " + std::to_string(config.seed) + "\n\n";

  if (summary) {
    text += "Dataset summary\n";
    text += detail::pad("", 11) + detail::pad("Users", 8) + detail::pad("Posts", 9) +
            detail::pad("Posts mu", 10) + detail::pad("Posts sd", 10) + "Median\n";
    for (const char* row : {"total", "depressed", "healthy"}) {
      const auto& g = summary->at(row);
      text += detail::pad(row, 11) + detail::pad(std::to_string(g.at("users").get<int>()), 8) +
              detail::pad(std::to_string(g.at("posts").get<long>()), 9) +
              detail::pad(detail::fmt(g.at("posts_mean").get<double>(), 2), 10) +
              detail::pad(detail::fmt(g.at("posts_sd").get<double>(), 2), 10) +
              detail::fmt(g.at("posts_median").get<double>(), 1) + "\n";
    }
    text += "\n";
  }

  for (const std::string ds : {"all", "pre", "ratings"}) {
    const auto fit = detail::try_load(config.out("fit_" + ds + ".json"));
    if (!fit) continue;
    const std::string title = ds == "all" ? "All-data model"
                              : ds == "pre" ? "Pre-diagnosis model"
                                            : "Ratings model";
    detail::render_fit_section(text, *fit, title);
    detail::render_freq_section(text, *fit, title);
  }

  if (any_classify) {
    text += "Classifier accuracy vs general-practitioner benchmark\n";
    text += detail::pad("", 13) + detail::pad("MVR mu", 10);
    if (classifier.contains("all")) text += detail::pad("All-data mu (sd)", 19);
    if (classifier.contains("pre")) text += detail::pad("Pre-diagnosis mu (sd)", 22);
    text += "\n";
    const std::vector<std::pair<std::string, double>> rows = {
        {"recall", BenchmarkConstants::recall},
        {"specificity", BenchmarkConstants::specificity},
        {"precision", BenchmarkConstants::precision},
        {"npv", BenchmarkConstants::npv},
        {"f1", BenchmarkConstants::f1}};
    for (const auto& [metric, mvr] : rows) {
      text += detail::pad(metric, 13) + detail::pad(detail::fmt(mvr), 10);
      for (const char* ds : {"all", "pre"}) {
        if (!classifier.contains(ds)) continue;
        text += detail::pad(detail::stat_cell(classifier.at(ds).at("run_report").at(metric)),
                            ds == std::string("all") ? 19 : 22);
      }
      text += "\n";
    }
    text += "\n";
  }

  if (const auto filters = detail::try_load(config.out("filters.json"))) {
    text += "Filter usage chi-squared\n";
    for (const char* ds : {"all", "pre"}) {
      const auto& f = filters->at(ds);
      text += detail::pad(ds, 5) + "chi2=" + detail::fmt(f.at("chi2").get<double>(), 2) +
              " df=" + std::to_string(f.at("df").get<int>()) +
              " p=" + format_double(f.at("p").get<double>()) + "\n";
    }
    text += "\n";
  }

  if (const auto correlations = detail::try_load(config.out("correlations.json"))) {
    if (correlations->contains("all") && !correlations->at("all").is_null()) {
      text += "Feature correlations (all-data)\n";
      // rebuild the lower triangle from the pair list
      std::vector<std::string> labels;
      std::map<std::pair<std::string, std::string>, double> r;
      for (const auto& pair : correlations->at("all")) {
        const std::string a = pair.at("a").get<std::string>();
        const std::string b = pair.at("b").get<std::string>();
        if (std::find(labels.begin(), labels.end(), b) == labels.end()) labels.push_back(b);
        if (std::find(labels.begin(), labels.end(), a) == labels.end()) labels.push_back(a);
        r[{a, b}] = pair.at("r").get<double>();
      }
      text += detail::pad("", 14);
      for (std::size_t j = 0; j + 1 < labels.size(); ++j) {
        text += detail::pad(labels[j].substr(0, 9), 10);
      }
      text += "\n";
      for (std::size_t i = 1; i < labels.size(); ++i) {
        text += detail::pad(labels[i], 14);
        for (std::size_t j = 0; j < i; ++j) {
          const auto it = r.find({labels[i], labels[j]});
          text += detail::pad(it != r.end() ? detail::fmt(it->second, 2) : "", 10);
        }
        text += "\n";
      }
      text += "\n";
    }
  }

  if (const auto agreement = detail::try_load(config.out("agreement.json"))) {
    text += "Inter-rater agreement (averaged over folds)\n";
    for (const char* cat : {"happy", "sad", "likable", "interesting"}) {
      text += detail::pad(cat, 13) + "r=" + detail::fmt(agreement->at("r").at(cat).get<double>(), 2) +
              "  p=" + format_double(agreement->at("p").at(cat).get<double>()) + "\n";
    }
    text += "\n";
  }

  if (!warnings.empty()) {
    text += "Warnings\n";
    for (const auto& w : warnings) text += "  - " + w + "\n";
  }
  atomic_write_file(config.out("report.txt"), text);

  std::cout << "report: " << sections.size() << " sections, " << warnings.size()
            << " warnings\n";
  return kExitOk;
}

}  // namespace photoscreen::pipeline
