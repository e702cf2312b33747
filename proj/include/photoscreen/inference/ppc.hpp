#pragma once

#include <vector>

#include "photoscreen/common/rng.hpp"
#include "photoscreen/inference/metropolis.hpp"

namespace photoscreen::inference {

// Posterior predictive check on class prevalence: draw a coefficient vector
// from the pooled post-burn-in draws, simulate outcomes, and record how often
// the replicated depressed proportion reaches the observed one.
inline double posterior_predictive_pvalue(const std::vector<McmcChain>& chains, const Mat& x,
                                          const std::vector<int>& y, int n_rep,
                                          std::uint64_t seed) {
  if (chains.empty()) throw ValidationError("ppc: no chains");
  if (n_rep < 1) throw ValidationError("ppc: n_rep must be >= 1");
  std::size_t total_draws = 0;
  for (const auto& c : chains) total_draws += c.draws.rows;
  if (total_draws == 0) throw ValidationError("ppc: chains carry no draws");

  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  double observed = 0.0;
  for (int v : y) observed += v;
  observed /= static_cast<double>(n);

  Rng rng(seed);
  int at_or_above = 0;
  Vec beta(d);
  for (int rep = 0; rep < n_rep; ++rep) {
    std::size_t idx = static_cast<std::size_t>(rng.uniform_int(total_draws));
    for (const auto& c : chains) {
      if (idx < c.draws.rows) {
        for (std::size_t j = 0; j < d; ++j) beta[j] = c.draws(idx, j);
        break;
      }
      idx -= c.draws.rows;
    }
    long hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double xb = 0.0;
      for (std::size_t j = 0; j < d; ++j) xb += x(i, j) * beta[j];
      if (rng.bernoulli(sigmoid(xb))) ++hits;
    }
    const double prop = static_cast<double>(hits) / static_cast<double>(n);
    if (prop >= observed) ++at_or_above;
  }
  return static_cast<double>(at_or_above) / static_cast<double>(n_rep);
}

}  // namespace photoscreen::inference
