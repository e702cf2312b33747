#pragma once

#include <cmath>
#include <vector>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"

namespace photoscreen::inference {

namespace detail {

inline double mean_of(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(const Vec& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace detail

// Potential scale reduction: R = sqrt(((n-1)/n W + B/n) / W), with W the mean
// within-chain sample variance and B/n the variance of the chain means. No
// degrees-of-freedom correction.
inline double gelman_rubin(const std::vector<Vec>& chains) {
  if (chains.size() < 2) throw ValidationError("gelman_rubin needs at least 2 chains");
  const std::size_t n = chains[0].size();
  if (n < 10) throw ValidationError("gelman_rubin needs chains of length >= 10");
  for (const auto& c : chains) {
    if (c.size() != n) throw ValidationError("gelman_rubin: chains must have equal length");
  }
  const std::size_t m = chains.size();
  Vec means(m);
  double w = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    means[j] = detail::mean_of(chains[j]);
    w += detail::sample_var(chains[j], means[j]);
  }
  w /= static_cast<double>(m);
  const double grand = detail::mean_of(means);
  const double b_over_n = detail::sample_var(means, grand);
  if (w == 0.0) return 1.0;  // constant chains
  const double nn = static_cast<double>(n);
  return std::sqrt(((nn - 1.0) / nn * w + b_over_n) / w);
}

struct GewekeResult {
  double z = 0.0;
  bool degenerate = false;  // zero-variance segments
};

// z-score comparing the means of the first and last chain segments, segment
// variances estimated by non-overlapping batch means (20 batches, fewer when
// a segment is shorter than 20 draws).
inline GewekeResult geweke(const Vec& chain, double first = 0.1, double last = 0.5) {
  const std::size_t n = chain.size();
  if (n < 100) throw ValidationError("geweke needs a chain of length >= 100");
  if (!(first > 0.0) || !(last > 0.0) || first + last > 1.0) {
    throw ValidationError("geweke: invalid segment fractions");
  }

  auto segment_stats = [](const double* data, std::size_t len, double* mean, double* var_mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += data[i];
    *mean = s / static_cast<double>(len);

    const std::size_t n_batches = std::min<std::size_t>(20, len);
    const std::size_t batch = len / n_batches;
    Vec bm(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
      double bs = 0.0;
      for (std::size_t i = 0; i < batch; ++i) bs += data[b * batch + i];
      bm[b] = bs / static_cast<double>(batch);
    }
    const double bmean = detail::mean_of(bm);
    const double bvar = n_batches > 1 ? detail::sample_var(bm, bmean) : 0.0;
    *var_mean = bvar / static_cast<double>(n_batches);
  };

  const std::size_t n1 = static_cast<std::size_t>(first * static_cast<double>(n));
  const std::size_t n2 = static_cast<std::size_t>(last * static_cast<double>(n));
  double mu1, v1, mu2, v2;
  segment_stats(chain.data(), n1, &mu1, &v1);
  segment_stats(chain.data() + (n - n2), n2, &mu2, &v2);

  GewekeResult r;
  const double denom = std::sqrt(v1 + v2);
  if (denom == 0.0) {
    r.degenerate = true;
    return r;
  }
  r.z = (mu1 - mu2) / denom;
  return r;
}

// Biased autocovariance estimator normalized so acf(0) == 1.
inline Vec autocorrelation(const Vec& chain, std::size_t max_lag) {
  const std::size_t n = chain.size();
  if (max_lag >= n / 2) throw ValidationError("autocorrelation: max_lag must be < length/2");
  const double mean = detail::mean_of(chain);
  double c0 = 0.0;
  for (double x : chain) c0 += (x - mean) * (x - mean);
  Vec acf(max_lag + 1, 0.0);
  acf[0] = 1.0;
  if (c0 == 0.0) return acf;  // constant chain
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += (chain[t] - mean) * (chain[t + k] - mean);
    acf[k] = ck / c0;
  }
  return acf;
}

}  // namespace photoscreen::inference
