#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/cohort/types.hpp"

namespace photoscreen::cohort {

struct GroupSummary {
  std::string label;
  int users = 0;
  long posts = 0;
  double posts_mean = 0.0;
  double posts_sd = 0.0;  // sample sd across users
  double posts_median = 0.0;
};

struct CohortSummary {
  GroupSummary total;
  GroupSummary depressed;
  GroupSummary healthy;
};

namespace detail {

inline GroupSummary summarize(const std::string& label, const std::vector<long>& counts) {
  GroupSummary s;
  s.label = label;
  s.users = static_cast<int>(counts.size());
  if (counts.empty()) return s;
  for (long c : counts) s.posts += c;
  s.posts_mean = static_cast<double>(s.posts) / s.users;
  if (s.users > 1) {
    double ss = 0.0;
    for (long c : counts) ss += (c - s.posts_mean) * (c - s.posts_mean);
    s.posts_sd = std::sqrt(ss / (s.users - 1));
  }
  std::vector<long> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.posts_median = (n % 2 == 1) ? static_cast<double>(sorted[n / 2])
                                : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  return s;
}

}  // namespace detail

// Per-group user counts, post counts, and mean/sd/median posts per user.
inline CohortSummary summary_stats(const std::vector<Participant>& participants,
                                   const std::vector<Post>& posts) {
  std::map<std::string, long> per_user;
  std::map<std::string, Group> group_of;
  for (const auto& p : participants) {
    group_of[p.id] = p.group;
    per_user[p.id] = 0;
  }
  for (const auto& post : posts) {
    auto it = per_user.find(post.participant_id);
    if (it != per_user.end()) ++it->second;
  }
  std::vector<long> all, dep, hea;
  for (const auto& [id, count] : per_user) {
    all.push_back(count);
    (group_of.at(id) == Group::depressed ? dep : hea).push_back(count);
  }
  return {detail::summarize("total", all), detail::summarize("depressed", dep),
          detail::summarize("healthy", hea)};
}

inline nlohmann::ordered_json summary_to_json(const CohortSummary& s) {
  auto row = [](const GroupSummary& g) {
    return nlohmann::ordered_json{{"users", g.users},
                                  {"posts", g.posts},
                                  {"posts_mean", g.posts_mean},
                                  {"posts_sd", g.posts_sd},
                                  {"posts_median", g.posts_median}};
  };
  return {{"total", row(s.total)}, {"depressed", row(s.depressed)}, {"healthy", row(s.healthy)}};
}

}  // namespace photoscreen::cohort
