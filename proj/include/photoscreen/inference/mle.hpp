#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "photoscreen/common/special.hpp"
#include "photoscreen/inference/logit.hpp"

namespace photoscreen::inference {

inline constexpr double kZ95 = 1.959964;  // two-sided 95% normal quantile

struct FreqFit {
  std::vector<std::string> names;
  Vec coef;
  Vec std_err;
  Vec z;
  Vec p;  // two-sided
  Vec ci_lo;
  Vec ci_hi;
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  double pseudo_r2 = 0.0;  // McFadden: 1 - LL/LL_null
  std::optional<double> llr_p;
  bool converged = false;
  std::string warning;
  std::size_t n_obs = 0;
  Mat covariance;  // inverse observed information
};

// Newton-Raphson maximum likelihood for the logistic model. Standard errors
// come from the inverse observed information; the likelihood-ratio p-value is
// chi-squared with (k - 1) degrees of freedom against the intercept-only fit.
inline FreqFit fit_logit_mle(const Mat& x, const std::vector<int>& y,
                             const std::vector<std::string>& names) {
  if (x.rows != y.size()) throw ValidationError("fit_logit_mle: rows do not match outcomes");
  if (names.size() != x.cols) throw ValidationError("fit_logit_mle: names do not match columns");
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (n < d + 1) throw ValidationError("fit_logit_mle: more parameters than observations");

  std::size_t ones = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError("fit_logit_mle: outcomes must be 0/1");
    ones += static_cast<std::size_t>(v);
  }
  if (ones == 0 || ones == n) {
    throw ValidationError("fit_logit_mle: both outcome classes must be present");
  }

  // column-rank check via X'X
  {
    Mat xtx(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j; k < d; ++k) xtx(j, k) += x(i, j) * x(i, k);
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < j; ++k) xtx(j, k) = xtx(k, j);
    }
    std::size_t bad = 0;
    if (!cholesky(xtx, &bad)) {
      throw ValidationError("design matrix is rank deficient at column '" + names[bad] + "'");
    }
  }

  const LogitSpec no_prior = [&] {
    LogitSpec s;
    s.names = names;
    s.prior_mean = Vec(d, 0.0);
    s.prior_precision = Mat(d, d);  // zero precision: pure likelihood
    return s;
  }();

  Vec beta(d, 0.0);
  double ll = log_likelihood(beta, x, y);
  bool converged = false;
  for (int iter = 0; iter < 100 && !converged; ++iter) {
    const Vec grad = log_posterior_gradient(beta, x, y, no_prior);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax < 1e-8) {
      converged = true;
      break;
    }
    Mat h = neg_hessian(beta, x, no_prior);
    auto chol = cholesky(h);
    if (!chol) {
      // flat curvature (e.g. separation): ridge the step, flag later
      for (std::size_t j = 0; j < d; ++j) h(j, j) += 1e-8;
      chol = cholesky(h);
      if (!chol) throw ConvergenceError("fit_logit_mle: Hessian not invertible");
    }
    const Vec step = chol_solve(*chol, grad);
    double scale = 1.0;
    // tolerance scaled by |LL| so float noise near the optimum cannot stall
    const double tol = 1e-10 + 1e-12 * std::fabs(ll);
    for (int halving = 0; halving < 40; ++halving) {
      Vec candidate(d);
      for (std::size_t j = 0; j < d; ++j) candidate[j] = beta[j] + scale * step[j];
      const double cll = log_likelihood(candidate, x, y);
      if (cll >= ll - tol) {
        beta = candidate;
        ll = cll;
        break;
      }
      scale *= 0.5;
    }
  }

  FreqFit fit;
  fit.names = names;
  fit.coef = beta;
  fit.n_obs = n;
  fit.log_likelihood = ll;
  fit.converged = converged;
  if (!converged) fit.warning = "did not converge in 100 iterations";

  // the gradient also vanishes under separation; flag it when every
  // observation is predicted essentially perfectly
  bool separated = true;
  for (std::size_t i = 0; i < n && separated; ++i) {
    double xb = 0.0;
    for (std::size_t j = 0; j < d; ++j) xb += x(i, j) * beta[j];
    const double pi = sigmoid(xb);
    separated = y[i] ? (pi > 1.0 - 1e-7) : (pi < 1e-7);
  }
  if (separated) {
    fit.converged = false;
    fit.warning = "perfect separation: maximum likelihood estimate does not exist";
  }

  const Mat h = neg_hessian(beta, x, no_prior);
  const auto chol = cholesky(h);
  if (!chol) throw ConvergenceError("fit_logit_mle: information matrix not positive definite");
  fit.covariance = chol_inverse(*chol);
  fit.std_err.resize(d);
  fit.z.resize(d);
  fit.p.resize(d);
  fit.ci_lo.resize(d);
  fit.ci_hi.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    fit.std_err[j] = std::sqrt(fit.covariance(j, j));
    fit.z[j] = beta[j] / fit.std_err[j];
    fit.p[j] = normal_two_sided_p(fit.z[j]);
    fit.ci_lo[j] = beta[j] - kZ95 * fit.std_err[j];
    fit.ci_hi[j] = beta[j] + kZ95 * fit.std_err[j];
  }

  const double ybar = static_cast<double>(ones) / static_cast<double>(n);
  fit.null_log_likelihood =
      static_cast<double>(n) * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
  fit.pseudo_r2 = 1.0 - fit.log_likelihood / fit.null_log_likelihood;
  if (d > 1) {
    const double lr = 2.0 * (fit.log_likelihood - fit.null_log_likelihood);
    fit.llr_p = reg_upper_gamma(static_cast<double>(d - 1) / 2.0, std::max(0.0, lr) / 2.0);
  }
  return fit;
}

inline FreqFit fit_logit_mle(const LogitData& data) {
  return fit_logit_mle(data.x, data.y, data.names);
}

}  // namespace photoscreen::inference
