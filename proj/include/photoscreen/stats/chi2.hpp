#pragma once

#include <string>
#include <vector>

#include "photoscreen/common/csv.hpp"
#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"
#include "photoscreen/common/special.hpp"

namespace photoscreen::stats {

// Upper-tail probability of the chi-squared distribution: Q(df/2, x/2).
inline double chi2_upper_tail(double x, int df) {
  if (x < 0.0) throw ValidationError("chi2_upper_tail: statistic must be >= 0");
  if (df < 1) throw ValidationError("chi2_upper_tail: df must be >= 1");
  if (x == 0.0) return 1.0;
  return reg_upper_gamma(static_cast<double>(df) / 2.0, x / 2.0);
}

struct ContingencyTable {
  std::vector<std::string> row_labels;  // filter names, "Normal" included
  std::vector<std::string> col_labels;  // groups
  Mat observed;

  void validate() const {
    if (observed.rows != row_labels.size() || observed.cols != col_labels.size()) {
      throw ValidationError("contingency table labels do not match counts");
    }
    if (observed.rows < 2 || observed.cols < 2) {
      throw ValidationError("contingency table needs at least 2 rows and 2 columns");
    }
    for (double v : observed.data) {
      if (v < 0.0) throw ValidationError("contingency table counts must be >= 0");
    }
  }
};

struct Chi2Result {
  double chi2 = 0.0;
  int df = 0;
  double p = 1.0;
  Mat expected;
  Mat difference;  // observed - expected, the quantity the usage plot shows
};

// Pearson chi-squared test of independence with per-cell expected counts and
// observed-minus-expected differences.
inline Chi2Result chi2_independence(const ContingencyTable& table) {
  table.validate();
  const std::size_t r = table.observed.rows;
  const std::size_t c = table.observed.cols;

  std::vector<double> row_total(r, 0.0), col_total(c, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      row_total[i] += table.observed(i, j);
      col_total[j] += table.observed(i, j);
      grand += table.observed(i, j);
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    if (row_total[i] <= 0.0) {
      throw ValidationError("zero marginal for row '" + table.row_labels[i] + "'");
    }
  }
  for (std::size_t j = 0; j < c; ++j) {
    if (col_total[j] <= 0.0) {
      throw ValidationError("zero marginal for column '" + table.col_labels[j] + "'");
    }
  }

  Chi2Result result;
  result.expected = Mat(r, c);
  result.difference = Mat(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double e = row_total[i] * col_total[j] / grand;
      result.expected(i, j) = e;
      result.difference(i, j) = table.observed(i, j) - e;
      result.chi2 += result.difference(i, j) * result.difference(i, j) / e;
    }
  }
  result.df = static_cast<int>((r - 1) * (c - 1));
  result.p = chi2_upper_tail(result.chi2, result.df);
  return result;
}

// CSV in the shape the filter-usage plot consumes:
// filter, group, observed, expected, difference
inline std::string chi2_differences_csv(const ContingencyTable& table, const Chi2Result& result) {
  std::string out = "filter,group,observed,expected,difference\n";
  for (std::size_t i = 0; i < table.observed.rows; ++i) {
    for (std::size_t j = 0; j < table.observed.cols; ++j) {
      out += csv_row({table.row_labels[i], table.col_labels[j],
                      format_double(table.observed(i, j)), format_double(result.expected(i, j)),
                      format_double(result.difference(i, j))});
    }
  }
  return out;
}

}  // namespace photoscreen::stats
