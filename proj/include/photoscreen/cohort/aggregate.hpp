#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "photoscreen/cohort/types.hpp"
#include "photoscreen/common/error.hpp"

namespace photoscreen::cohort {

struct AggregateResult {
  std::vector<UserDay> user_days;
  std::vector<std::string> skipped_posts;  // posts lacking extracted features
};

// Per-post rating means, attached before aggregation when ratings exist.
struct PostRatings {
  double happy = 0.0, sad = 0.0, likable = 0.0, interesting = 0.0;
};

// Collapses posts into per-participant, per-UTC-day observations. Aggregators
// are fixed: means for HSV/likes/comments/face count, counts for filtered and
// face-bearing posts. Posts without features are reported, not aggregated.
inline AggregateResult aggregate_user_days(
    const std::vector<Post>& posts, const std::vector<Participant>& participants,
    const std::map<std::string, PostRatings>& post_ratings = {}) {
  std::map<std::string, Group> group_of;
  for (const auto& p : participants) group_of[p.id] = p.group;

  AggregateResult result;
  std::map<std::pair<std::string, Date>, std::vector<const Post*>> buckets;
  for (const auto& post : posts) {
    auto git = group_of.find(post.participant_id);
    if (git == group_of.end()) {
      throw ValidationError("post '" + post.id + "' references unknown participant '" +
                            post.participant_id + "'");
    }
    if (!post.features) {
      result.skipped_posts.push_back(post.id);
      continue;
    }
    buckets[{post.participant_id, post.date()}].push_back(&post);
  }

  for (const auto& [key, members] : buckets) {
    UserDay day;
    day.participant_id = key.first;
    day.date = key.second;
    day.target = group_of.at(key.first);
    day.posts_per_day = static_cast<int>(members.size());

    double hue = 0, sat = 0, bri = 0, com = 0, lik = 0, fc = 0;
    RatingMeans rm;
    for (const Post* p : members) {
      hue += p->features->mean_hue;
      sat += p->features->mean_saturation;
      bri += p->features->mean_brightness;
      com += p->comment_count;
      lik += p->like_count;
      fc += p->features->face_count;
      if (p->has_filter()) ++day.filtered_count;
      if (p->features->has_face) ++day.face_post_count;
      auto rit = post_ratings.find(p->id);
      if (rit != post_ratings.end()) {
        rm.happy += rit->second.happy;
        rm.sad += rit->second.sad;
        rm.likable += rit->second.likable;
        rm.interesting += rit->second.interesting;
        ++rm.rated_posts;
      }
    }
    const double n = static_cast<double>(members.size());
    day.mean_hue = hue / n;
    day.mean_saturation = sat / n;
    day.mean_brightness = bri / n;
    day.comments = com / n;
    day.likes = lik / n;
    day.mean_face_count = fc / n;
    if (rm.rated_posts > 0) {
      const double rn = rm.rated_posts;
      rm.happy /= rn;
      rm.sad /= rn;
      rm.likable /= rn;
      rm.interesting /= rn;
      day.ratings = rm;
    }
    result.user_days.push_back(std::move(day));
  }
  return result;  // bucket map iteration gives (participant, date) order
}

// Keeps every healthy observation; keeps depressed observations dated
// strictly before the participant's diagnosis date.
inline std::vector<UserDay> split_pre_diagnosis(const std::vector<UserDay>& user_days,
                                                const std::vector<Participant>& participants) {
  std::map<std::string, Date> diagnosis;
  for (const auto& p : participants) {
    if (p.group == Group::depressed) {
      if (!p.diagnosis_date) {
        throw ValidationError("participant '" + p.id + "' lacks a diagnosis date");
      }
      diagnosis[p.id] = *p.diagnosis_date;
    }
  }
  std::vector<UserDay> out;
  for (const auto& day : user_days) {
    if (day.target == Group::healthy) {
      out.push_back(day);
    } else if (day.date < diagnosis.at(day.participant_id)) {
      out.push_back(day);
    }
  }
  return out;
}

inline constexpr int kRatingSubsetSize = 100;

// Chooses which posts go to human raters. Depressed: posts within one year of
// the diagnosis date, then the 100 closest strictly-prior ones. Healthy: the
// 100 most recent posts before the participation date; when no participation
// date is supplied for a participant, all posts are eligible.
inline std::vector<std::string> select_rating_subset(
    const std::vector<Post>& posts, const std::vector<Participant>& participants,
    const std::map<std::string, Date>& participation_dates = {}) {
  std::map<std::string, const Participant*> by_id;
  for (const auto& p : participants) by_id[p.id] = &p;

  std::map<std::string, std::vector<const Post*>> candidates;
  for (const auto& post : posts) {
    auto it = by_id.find(post.participant_id);
    if (it == by_id.end()) continue;
    const Participant& p = *it->second;
    const Date post_date = post.date();
    if (p.group == Group::depressed) {
      if (!p.diagnosis_date) {
        throw ValidationError("participant '" + p.id + "' lacks a diagnosis date");
      }
      const std::int64_t delta = day_number(post_date) - day_number(*p.diagnosis_date);
      if (delta < -365 || delta > 365) continue;  // outside the +-1 year window
      if (!(post_date < *p.diagnosis_date)) continue;
      candidates[p.id].push_back(&post);
    } else {
      auto pit = participation_dates.find(p.id);
      if (pit != participation_dates.end() && !(post_date < pit->second)) continue;
      candidates[p.id].push_back(&post);
    }
  }

  std::vector<std::string> selected;
  for (auto& [pid, list] : candidates) {
    std::sort(list.begin(), list.end(), [](const Post* a, const Post* b) {
      if (a->timestamp != b->timestamp) return a->timestamp > b->timestamp;
      return a->id < b->id;
    });
    const std::size_t take = std::min<std::size_t>(kRatingSubsetSize, list.size());
    for (std::size_t i = 0; i < take; ++i) selected.push_back(list[i]->id);
  }
  return selected;
}

inline constexpr int kRatingFloor = 3;  // minimum raters per included photo

struct RatingAggregation {
  std::map<std::string, PostRatings> means;       // per rated post
  std::map<std::string, int> rater_counts;        // per rated post
  std::vector<std::string> below_floor;           // rated by fewer than 3
  std::vector<std::string> excluded_zero_rating;  // expected but never rated
};

// Averages ratings across raters per post. Posts rated by fewer than the
// 3-rater floor are kept but flagged; expected posts with no ratings at all
// are excluded and listed.
inline RatingAggregation aggregate_ratings(const std::vector<Rating>& ratings,
                                           const std::vector<std::string>& expected_posts = {}) {
  RatingAggregation out;
  for (const auto& r : ratings) {
    r.validate();
    PostRatings& m = out.means[r.post_id];
    m.happy += r.happy;
    m.sad += r.sad;
    m.likable += r.likable;
    m.interesting += r.interesting;
    ++out.rater_counts[r.post_id];
  }
  for (auto& [post_id, m] : out.means) {
    const double n = out.rater_counts.at(post_id);
    m.happy /= n;
    m.sad /= n;
    m.likable /= n;
    m.interesting /= n;
    if (n < kRatingFloor) out.below_floor.push_back(post_id);
  }
  for (const auto& id : expected_posts) {
    if (!out.means.count(id)) out.excluded_zero_rating.push_back(id);
  }
  return out;
}

}  // namespace photoscreen::cohort
