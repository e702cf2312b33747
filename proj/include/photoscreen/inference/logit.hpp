#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "photoscreen/cohort/feature_matrix.hpp"
#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"

namespace photoscreen::inference {

// Bernoulli outcome with logistic link and a multivariate normal prior on the
// coefficient vector: beta ~ N(b0, B0^-1) with B0 a precision matrix.
struct LogitSpec {
  std::vector<std::string> names;  // includes the intercept
  Vec prior_mean;                  // b0
  Mat prior_precision;             // B0

  static LogitSpec diffuse(std::vector<std::string> names, double precision = 1e-4) {
    LogitSpec s;
    const std::size_t d = names.size();
    s.names = std::move(names);
    s.prior_mean = Vec(d, 0.0);
    s.prior_precision = Mat(d, d);
    for (std::size_t i = 0; i < d; ++i) s.prior_precision(i, i) = precision;
    return s;
  }

  std::size_t dim() const { return names.size(); }

  void validate(std::size_t cols) const {
    if (names.size() != cols || prior_mean.size() != cols || prior_precision.rows != cols ||
        prior_precision.cols != cols) {
      throw ValidationError("logit spec dimensions do not match the design matrix");
    }
  }
};

// Design matrix with a leading intercept column.
struct LogitData {
  Mat x;
  std::vector<int> y;
  std::vector<std::string> names;
};

inline LogitData build_design(const cohort::FeatureMatrix& m) {
  m.validate();
  LogitData d;
  d.names.push_back("intercept");
  d.names.insert(d.names.end(), m.feature_names.begin(), m.feature_names.end());
  d.x = Mat(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    d.x(i, 0) = 1.0;
    for (std::size_t j = 0; j < m.cols(); ++j) d.x(i, j + 1) = m.values(i, j);
  }
  d.y = m.target;
  return d;
}

inline LogitData intercept_only_design(const std::vector<int>& y) {
  LogitData d;
  d.names = {"intercept"};
  d.x = Mat(y.size(), 1, 1.0);
  d.y = y;
  return d;
}

// log(1 + exp(v)) without overflow
inline double softplus(double v) {
  if (v > 0.0) return v + std::log1p(std::exp(-v));
  return std::log1p(std::exp(v));
}

inline double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

inline double log_likelihood(const Vec& beta, const Mat& x, const std::vector<int>& y) {
  if (beta.size() != x.cols || y.size() != x.rows) {
    throw ValidationError("log_likelihood: dimension mismatch");
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double xb = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) xb += x(i, j) * beta[j];
    ll += (y[i] ? xb : 0.0) - softplus(xb);
  }
  return ll;
}

// fully normalized N(b0, B0^-1) log-density
inline double log_prior(const Vec& beta, const LogitSpec& spec) {
  const std::size_t d = spec.dim();
  if (beta.size() != d) throw ValidationError("log_prior: dimension mismatch");
  const auto chol = cholesky(spec.prior_precision);
  if (!chol) throw ValidationError("prior precision is not positive definite");
  Vec centered(d);
  for (std::size_t i = 0; i < d; ++i) centered[i] = beta[i] - spec.prior_mean[i];
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      quad += centered[i] * spec.prior_precision(i, j) * centered[j];
    }
  }
  constexpr double kLog2Pi = 1.8378770664093453;
  return -0.5 * d * kLog2Pi + 0.5 * chol_log_det(*chol) - 0.5 * quad;
}

inline double log_posterior(const Vec& beta, const Mat& x, const std::vector<int>& y,
                            const LogitSpec& spec) {
  spec.validate(x.cols);
  return log_likelihood(beta, x, y) + log_prior(beta, spec);
}

// gradient of the log posterior: X'(y - pi) - B0 (beta - b0)
inline Vec log_posterior_gradient(const Vec& beta, const Mat& x, const std::vector<int>& y,
                                  const LogitSpec& spec) {
  const std::size_t d = x.cols;
  Vec grad(d, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double xb = 0.0;
    for (std::size_t j = 0; j < d; ++j) xb += x(i, j) * beta[j];
    const double resid = static_cast<double>(y[i]) - sigmoid(xb);
    for (std::size_t j = 0; j < d; ++j) grad[j] += x(i, j) * resid;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      grad[i] -= spec.prior_precision(i, j) * (beta[j] - spec.prior_mean[j]);
    }
  }
  return grad;
}

// negative Hessian of the log posterior: X' W X + B0, W = diag(pi (1 - pi))
inline Mat neg_hessian(const Vec& beta, const Mat& x, const LogitSpec& spec) {
  const std::size_t d = x.cols;
  Mat h = spec.prior_precision;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double xb = 0.0;
    for (std::size_t j = 0; j < d; ++j) xb += x(i, j) * beta[j];
    const double pi = sigmoid(xb);
    const double w = pi * (1.0 - pi);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = j; k < d; ++k) {
        h(j, k) += w * x(i, j) * x(i, k);
      }
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) h(j, k) = h(k, j);
  }
  return h;
}

}  // namespace photoscreen::inference
