#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/inference/diagnostics.hpp"
#include "photoscreen/inference/hpd.hpp"
#include "photoscreen/inference/metropolis.hpp"

namespace photoscreen::inference {

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double odds = 0.0;            // exp(mean)
  double hpd_level = 0.0;       // max grid level excluding zero; 0 = none
  double hpd_lo = 0.0;          // interval at hpd_level (or 95% when none)
  double hpd_hi = 0.0;
  double rhat = 1.0;            // 1.0 when only one chain is available
  double geweke_z = 0.0;        // max |z| across chains
  bool geweke_degenerate = false;
  double acf_lag30 = 0.0;       // first chain
};

struct PosteriorSummary {
  std::vector<ParamSummary> params;
  double acceptance_rate = 0.0;  // mean across chains
};

// Pooled post-burn-in summaries in the shape of the regression tables:
// coefficient mean (sd), the highest grid level whose HPD excludes zero, the
// interval at that level, odds, and convergence diagnostics.
inline PosteriorSummary summarize_posterior(const std::vector<McmcChain>& chains,
                                            const std::vector<std::string>& names) {
  if (chains.empty()) throw ValidationError("summarize_posterior: no chains");
  const std::size_t d = chains[0].draws.cols;
  if (names.size() != d) throw ValidationError("summarize_posterior: name count mismatch");

  PosteriorSummary summary;
  for (const auto& c : chains) summary.acceptance_rate += c.acceptance_rate;
  summary.acceptance_rate /= static_cast<double>(chains.size());

  for (std::size_t j = 0; j < d; ++j) {
    ParamSummary p;
    p.name = names[j];
    const Vec pooled = pooled_column(chains, j);
    const std::size_t n = pooled.size();
    double mean = 0.0;
    for (double v : pooled) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : pooled) ss += (v - mean) * (v - mean);
    p.mean = mean;
    p.sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    p.odds = std::exp(mean);

    p.hpd_level = max_excluding_zero_level(pooled);
    const double interval_level = p.hpd_level > 0.0 ? p.hpd_level : 0.95;
    const auto [lo, hi] = hpd_interval(pooled, interval_level);
    p.hpd_lo = lo;
    p.hpd_hi = hi;

    if (chains.size() >= 2) {
      std::vector<Vec> per_chain;
      for (const auto& c : chains) per_chain.push_back(c.column(j));
      p.rhat = gelman_rubin(per_chain);
    }
    for (const auto& c : chains) {
      const Vec col = c.column(j);
      if (col.size() >= 100) {
        const GewekeResult g = geweke(col);
        if (g.degenerate) {
          p.geweke_degenerate = true;
        } else if (std::fabs(g.z) > std::fabs(p.geweke_z)) {
          p.geweke_z = g.z;
        }
      }
    }
    const Vec first = chains[0].column(j);
    if (first.size() > 62) p.acf_lag30 = autocorrelation(first, 30)[30];
    summary.params.push_back(std::move(p));
  }
  return summary;
}

inline nlohmann::ordered_json posterior_summary_to_json(const PosteriorSummary& s) {
  nlohmann::ordered_json coefs;
  for (const auto& p : s.params) {
    nlohmann::ordered_json j;
    j["mean"] = p.mean;
    j["sd"] = p.sd;
    j["odds"] = p.odds;
    if (p.hpd_level > 0.0) {
      j["hpd"] = nlohmann::ordered_json{
          {"level", p.hpd_level}, {"lo", p.hpd_lo}, {"hi", p.hpd_hi}};
    } else {
      j["hpd"] = nlohmann::ordered_json{
          {"level", nullptr}, {"lo", p.hpd_lo}, {"hi", p.hpd_hi}};
    }
    j["rhat"] = p.rhat;
    if (p.geweke_degenerate) {
      j["geweke_z"] = nullptr;
    } else {
      j["geweke_z"] = p.geweke_z;
    }
    j["acf_lag30"] = p.acf_lag30;
    coefs[p.name] = j;
  }
  return nlohmann::ordered_json{{"coef", coefs}, {"acceptance_rate", s.acceptance_rate}};
}

}  // namespace photoscreen::inference
