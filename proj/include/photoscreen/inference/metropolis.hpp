#pragma once

#include <cmath>
#include <thread>
#include <vector>

#include "photoscreen/common/rng.hpp"
#include "photoscreen/inference/logit.hpp"
#include "photoscreen/inference/mle.hpp"

namespace photoscreen::inference {

struct McmcConfig {
  int chains = 2;
  int iterations = 100000;
  int burn_in = 10000;
  int thin = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (chains < 1) throw ValidationError("mcmc: chains must be >= 1");
    if (iterations < 1) throw ValidationError("mcmc: iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations) {
      throw ValidationError("mcmc: burn_in must be in [0, iterations)");
    }
    if (thin < 1) throw ValidationError("mcmc: thin must be >= 1");
  }

  std::size_t kept_draws() const {
    return static_cast<std::size_t>((iterations - burn_in) / thin);
  }
};

struct McmcChain {
  Mat draws;  // kept (post burn-in, thinned) x parameters
  double acceptance_rate = 0.0;

  Vec column(std::size_t j) const {
    Vec v(draws.rows);
    for (std::size_t i = 0; i < draws.rows; ++i) v[i] = draws(i, j);
    return v;
  }
};

// Generic random-walk Metropolis over an arbitrary log target; also the core
// of the logistic-regression sampler below.
template <typename LogTarget>
McmcChain metropolis_sample(LogTarget&& log_target, const Vec& start, const Mat& proposal_chol,
                            double proposal_scale, const McmcConfig& config, int chain_index) {
  const std::size_t d = start.size();
  Rng rng(config.seed + static_cast<std::uint64_t>(chain_index));

  McmcChain out;
  Vec beta = start;
  double lp = log_target(beta);
  out.draws = Mat(config.kept_draws(), d);

  std::size_t kept = 0;
  long accepted = 0;
  Vec z(d), candidate(d);
  for (int t = 1; t <= config.iterations; ++t) {
    for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal();
    for (std::size_t j = 0; j < d; ++j) {
      double step = 0.0;
      for (std::size_t k = 0; k <= j; ++k) step += proposal_chol(j, k) * z[k];
      candidate[j] = beta[j] + proposal_scale * step;
    }
    const double clp = log_target(candidate);
    if (std::log(1.0 - rng.uniform()) < clp - lp) {  // (0,1] guards log(0)
      beta = candidate;
      lp = clp;
      ++accepted;
    }
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0 && kept < out.draws.rows) {
      for (std::size_t j = 0; j < d; ++j) out.draws(kept, j) = beta[j];
      ++kept;
    }
  }
  out.acceptance_rate = static_cast<double>(accepted) / config.iterations;
  return out;
}

namespace detail {

inline void run_chain(const Mat& x, const std::vector<int>& y, const LogitSpec& spec,
                      const McmcConfig& config, const Vec& start, const Mat& proposal_chol,
                      double proposal_scale, int chain_index, McmcChain* out) {
  *out = metropolis_sample(
      [&](const Vec& beta) { return log_posterior(beta, x, y, spec); }, start, proposal_chol,
      proposal_scale, config, chain_index);
}

}  // namespace detail

// Random-walk Metropolis with a multivariate normal proposal whose covariance
// is (2.38^2 / d) * MLE covariance — the standard optimal-scaling choice.
// Chains are seeded seed + chain_index and may run concurrently; results are
// identical either way.
inline std::vector<McmcChain> run_metropolis(const Mat& x, const std::vector<int>& y,
                                             const LogitSpec& spec, const McmcConfig& config,
                                             int n_threads = 1) {
  config.validate();
  spec.validate(x.cols);
  const std::size_t d = x.cols;

  const FreqFit mle = fit_logit_mle(x, y, spec.names);
  Mat proposal = mle.covariance;
  auto chol = cholesky(proposal);
  if (!chol) {
    for (std::size_t j = 0; j < d; ++j) proposal(j, j) += 1e-8;
    chol = cholesky(proposal);
    if (!chol) throw ConvergenceError("metropolis: proposal covariance not positive definite");
  }
  const double scale = 2.38 / std::sqrt(static_cast<double>(d));

  std::vector<McmcChain> chains(config.chains);
  if (n_threads <= 1 || config.chains == 1) {
    for (int c = 0; c < config.chains; ++c) {
      detail::run_chain(x, y, spec, config, mle.coef, *chol, scale, c, &chains[c]);
    }
  } else {
    std::vector<std::thread> workers;
    for (int c = 0; c < config.chains; ++c) {
      workers.emplace_back(detail::run_chain, std::cref(x), std::cref(y), std::cref(spec),
                           std::cref(config), std::cref(mle.coef), std::cref(*chol), scale, c,
                           &chains[c]);
    }
    for (auto& w : workers) w.join();
  }
  return chains;
}

inline Vec pooled_column(const std::vector<McmcChain>& chains, std::size_t j) {
  Vec out;
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.draws.rows; ++i) out.push_back(chain.draws(i, j));
  }
  return out;
}

}  // namespace photoscreen::inference
