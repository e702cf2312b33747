#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "photoscreen/common/error.hpp"

namespace photoscreen::forest {

// Confusion-table metrics with class 1 (depressed) as the positive class.
// Zero-denominator metrics are left undefined rather than coerced to 0.
struct ConfusionMetrics {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> npv;
  std::optional<double> f1;
  std::optional<double> accuracy;  // naive accuracy; reported but flagged

  static ConfusionMetrics from_counts(long tp, long fp, long fn, long tn) {
    ConfusionMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / (tp + fn);
    if (tn + fp > 0) m.specificity = static_cast<double>(tn) / (tn + fp);
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / (tp + fp);
    if (tn + fn > 0) m.npv = static_cast<double>(tn) / (tn + fn);
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
      m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    const long total = tp + fp + fn + tn;
    if (total > 0) m.accuracy = static_cast<double>(tp + tn) / total;
    return m;
  }
};

inline ConfusionMetrics evaluate(const std::vector<int>& truth,
                                 const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) {
    throw ValidationError("evaluate: label vectors differ in length");
  }
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != 0 && truth[i] != 1) throw ValidationError("evaluate: labels must be 0/1");
    if (predicted[i] != 0 && predicted[i] != 1) {
      throw ValidationError("evaluate: predictions must be 0/1");
    }
    if (truth[i] == 1) {
      (predicted[i] == 1 ? tp : fn) += 1;
    } else {
      (predicted[i] == 1 ? fp : tn) += 1;
    }
  }
  return ConfusionMetrics::from_counts(tp, fp, fn, tn);
}

}  // namespace photoscreen::forest
