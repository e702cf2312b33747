#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "photoscreen/cohort/types.hpp"
#include "photoscreen/common/rng.hpp"
#include "photoscreen/stats/correlation.hpp"

namespace photoscreen::stats {

struct AgreementReport {
  // per-category Pearson r averaged across resampling folds
  double happy = 0.0;
  double sad = 0.0;
  double likable = 0.0;
  double interesting = 0.0;
  // p-values computed from the averaged r at the included photo count
  double happy_p = 1.0;
  double sad_p = 1.0;
  double likable_p = 1.0;
  double interesting_p = 1.0;
  std::size_t photos_included = 0;
  std::size_t photos_excluded = 0;  // fewer than two raters
  int folds = 0;
};

// Inter-rater agreement: per fold, pick two raters at random from every photo
// with at least two, correlate the two resulting vectors per category, and
// average r across folds.
inline AgreementReport interrater_agreement(const std::vector<cohort::Rating>& ratings,
                                            int n_folds = 5, std::uint64_t seed = 0) {
  if (n_folds < 1) throw ValidationError("interrater_agreement: n_folds must be >= 1");

  std::map<std::string, std::vector<const cohort::Rating*>> by_photo;
  for (const auto& r : ratings) by_photo[r.post_id].push_back(&r);

  std::vector<std::vector<const cohort::Rating*>> eligible;
  AgreementReport report;
  for (auto& [post_id, raters] : by_photo) {
    if (raters.size() < 2) {
      ++report.photos_excluded;
      continue;
    }
    std::sort(raters.begin(), raters.end(),
              [](const cohort::Rating* a, const cohort::Rating* b) {
                return a->rater_id < b->rater_id;
              });
    eligible.push_back(raters);
  }
  if (eligible.empty()) {
    throw ValidationError("interrater_agreement: no photo has two or more raters");
  }
  report.photos_included = eligible.size();
  report.folds = n_folds;

  double sums[4] = {0, 0, 0, 0};
  for (int fold = 0; fold < n_folds; ++fold) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(fold)));
    Vec a[4], b[4];
    for (const auto& raters : eligible) {
      const std::size_t i = static_cast<std::size_t>(rng.uniform_int(raters.size()));
      std::size_t j = static_cast<std::size_t>(rng.uniform_int(raters.size() - 1));
      if (j >= i) ++j;
      const cohort::Rating* first = raters[i];
      const cohort::Rating* second = raters[j];
      a[0].push_back(first->happy);
      a[1].push_back(first->sad);
      a[2].push_back(first->likable);
      a[3].push_back(first->interesting);
      b[0].push_back(second->happy);
      b[1].push_back(second->sad);
      b[2].push_back(second->likable);
      b[3].push_back(second->interesting);
    }
    for (int c = 0; c < 4; ++c) sums[c] += pearson_r(a[c], b[c]).r;
  }

  auto p_of = [&](double r) {
    if (report.photos_included < 3) return 1.0;  // no degrees of freedom
    const double df = static_cast<double>(report.photos_included - 2);
    if (std::fabs(r) >= 1.0) return 0.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return student_t_two_sided_p(t, df);
  };
  report.happy = sums[0] / n_folds;
  report.sad = sums[1] / n_folds;
  report.likable = sums[2] / n_folds;
  report.interesting = sums[3] / n_folds;
  report.happy_p = p_of(report.happy);
  report.sad_p = p_of(report.sad);
  report.likable_p = p_of(report.likable);
  report.interesting_p = p_of(report.interesting);
  return report;
}

}  // namespace photoscreen::stats
