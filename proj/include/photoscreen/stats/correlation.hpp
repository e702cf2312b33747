#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "photoscreen/common/csv.hpp"
#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"
#include "photoscreen/common/special.hpp"

namespace photoscreen::stats {

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;  // two-sided, via the t transform
  std::size_t n = 0;
};

inline PearsonResult pearson_r(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw ValidationError("pearson_r: vectors differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw ValidationError("pearson_r: need at least 3 pairs");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson_r: zero-variance input");

  PearsonResult result;
  result.n = n;
  result.r = sxy / std::sqrt(sxx * syy);
  if (result.r > 1.0) result.r = 1.0;
  if (result.r < -1.0) result.r = -1.0;
  const double df = static_cast<double>(n - 2);
  if (std::fabs(result.r) >= 1.0) {
    result.p = 0.0;
  } else {
    const double t = result.r * std::sqrt(df / (1.0 - result.r * result.r));
    result.p = student_t_two_sided_p(t, df);
  }
  return result;
}

// Lower-triangular pairwise correlations over the selected columns of a
// design matrix, in the shape of the published correlation tables.
struct CorrelationMatrix {
  std::vector<std::string> labels;
  Mat r;       // full symmetric storage; consumers read the lower triangle
  Mat p;

  std::string to_csv() const {
    std::string out;
    std::vector<std::string> header = {""};
    for (std::size_t j = 0; j + 1 < labels.size(); ++j) header.push_back(labels[j]);
    out += csv_row(header);
    for (std::size_t i = 1; i < labels.size(); ++i) {
      std::vector<std::string> row = {labels[i]};
      for (std::size_t j = 0; j < i; ++j) row.push_back(format_double(r(i, j)));
      out += csv_row(row);
    }
    return out;
  }
};

inline CorrelationMatrix correlation_matrix(const Mat& values,
                                            const std::vector<std::string>& labels) {
  if (values.cols != labels.size()) {
    throw ValidationError("correlation_matrix: labels do not match columns");
  }
  if (values.cols < 2) throw ValidationError("correlation_matrix: need at least 2 columns");
  CorrelationMatrix m;
  m.labels = labels;
  m.r = Mat(values.cols, values.cols);
  m.p = Mat(values.cols, values.cols, 1.0);
  for (std::size_t j = 0; j < values.cols; ++j) m.r(j, j) = 1.0;

  for (std::size_t a = 1; a < values.cols; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      Vec va(values.rows), vb(values.rows);
      for (std::size_t i = 0; i < values.rows; ++i) {
        va[i] = values(i, a);
        vb[i] = values(i, b);
      }
      const PearsonResult pr = pearson_r(va, vb);  // zero-variance errors propagate
      m.r(a, b) = pr.r;
      m.r(b, a) = pr.r;
      m.p(a, b) = pr.p;
      m.p(b, a) = pr.p;
    }
  }
  return m;
}

}  // namespace photoscreen::stats
