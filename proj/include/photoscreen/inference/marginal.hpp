#pragma once

#include <cmath>
#include <string>

#include "photoscreen/inference/logit.hpp"
#include "photoscreen/inference/mle.hpp"

namespace photoscreen::inference {

// Newton ascent on the log posterior; the prior keeps it strictly concave.
inline Vec posterior_mode(const Mat& x, const std::vector<int>& y, const LogitSpec& spec) {
  spec.validate(x.cols);
  const std::size_t d = x.cols;
  Vec beta(d, 0.0);
  double lp = log_posterior(beta, x, y, spec);
  for (int iter = 0; iter < 200; ++iter) {
    const Vec grad = log_posterior_gradient(beta, x, y, spec);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax < 1e-8) return beta;
    const Mat h = neg_hessian(beta, x, spec);
    const auto chol = cholesky(h);
    if (!chol) throw ConvergenceError("posterior_mode: Hessian not positive definite");
    const Vec step = chol_solve(*chol, grad);
    double scale = 1.0;
    const double tol = 1e-10 + 1e-12 * std::fabs(lp);
    for (int halving = 0; halving < 40; ++halving) {
      Vec candidate(d);
      for (std::size_t j = 0; j < d; ++j) candidate[j] = beta[j] + scale * step[j];
      const double clp = log_posterior(candidate, x, y, spec);
      if (clp >= lp - tol) {
        beta = candidate;
        lp = clp;
        break;
      }
      scale *= 0.5;
    }
  }
  throw ConvergenceError("posterior_mode: did not converge");
}

// Laplace approximation to the log marginal likelihood:
//   log p(D) ~= log p(D|mode) + log p(mode) + (d/2) log 2pi - 1/2 log det H
// with H the negative Hessian of the log posterior at its mode.
inline double log_marginal_laplace(const Mat& x, const std::vector<int>& y,
                                   const LogitSpec& spec) {
  const Vec mode = posterior_mode(x, y, spec);
  const Mat h = neg_hessian(mode, x, spec);
  const auto chol = cholesky(h);
  if (!chol) throw ConvergenceError("laplace: Hessian not positive definite at mode");
  constexpr double kLog2Pi = 1.8378770664093453;
  return log_posterior(mode, x, y, spec) + 0.5 * static_cast<double>(x.cols) * kLog2Pi -
         0.5 * chol_log_det(*chol);
}

struct BayesFactorResult {
  double log_marginal_full = 0.0;
  double log_marginal_null = 0.0;
  double k = 0.0;  // may overflow to inf; the label uses log space
  std::string label;
};

// Jeffreys key; boundaries at 10^0, 10^(1/2), 10^1, 10^(3/2), 10^2, assigned
// to the upper band when K lands exactly on one.
inline std::string jeffreys_label(double log_k) {
  const double log10_k = log_k / std::log(10.0);
  if (log10_k < 0.0) return "Negative evidence";
  if (log10_k < 0.5) return "Barely worth mentioning";
  if (log10_k < 1.0) return "Substantial";
  if (log10_k < 1.5) return "Strong";
  if (log10_k < 2.0) return "Very strong";
  return "Decisive";
}

inline BayesFactorResult bayes_factor(double log_marginal_full, double log_marginal_null) {
  BayesFactorResult r;
  r.log_marginal_full = log_marginal_full;
  r.log_marginal_null = log_marginal_null;
  const double log_k = log_marginal_full - log_marginal_null;
  r.k = std::exp(log_k);
  r.label = jeffreys_label(log_k);
  return r;
}

}  // namespace photoscreen::inference
