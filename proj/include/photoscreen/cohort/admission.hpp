#pragma once

#include <span>
#include <string>

#include "photoscreen/cohort/types.hpp"
#include "photoscreen/common/error.hpp"

namespace photoscreen::cohort {

// CES-D instrument scoring: 20 items, each 0-3, items 4/8/12/16 (1-based)
// reverse-scored as (3 - raw). Total range 0-60.
inline int score_cesd(std::span<const int> responses) {
  if (responses.size() != 20) {
    throw ValidationError("CES-D requires exactly 20 responses, got " +
                          std::to_string(responses.size()));
  }
  int total = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const int raw = responses[i];
    if (raw < 0 || raw > 3) {
      throw ValidationError("CES-D item " + std::to_string(i + 1) + " outside 0-3 (got " +
                            std::to_string(raw) + ")");
    }
    const bool reverse = (i + 1 == 4) || (i + 1 == 8) || (i + 1 == 12) || (i + 1 == 16);
    total += reverse ? 3 - raw : raw;
  }
  return total;
}

inline constexpr int kMinPosts = 5;       // fewer than five posts -> excluded
inline constexpr int kCesdCutoff = 22;    // scores of 21 or lower -> excluded

enum class ExclusionReason { none, min_posts, cesd };

struct AdmissionResult {
  bool admitted = false;
  ExclusionReason reason = ExclusionReason::none;
};

inline std::string exclusion_reason_name(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::min_posts: return "min_posts";
    case ExclusionReason::cesd: return "cesd";
    default: return "none";
  }
}

inline AdmissionResult admit_participant(const Participant& p, int post_count) {
  p.validate();
  if (post_count < kMinPosts) return {false, ExclusionReason::min_posts};
  if (p.group == Group::depressed && *p.cesd_score < kCesdCutoff) {
    return {false, ExclusionReason::cesd};
  }
  return {true, ExclusionReason::none};
}

}  // namespace photoscreen::cohort
