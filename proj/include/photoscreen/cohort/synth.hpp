#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/cohort/aggregate.hpp"
#include "photoscreen/cohort/io.hpp"
#include "photoscreen/cohort/types.hpp"
#include "photoscreen/common/rng.hpp"

namespace photoscreen::cohort {

// Per-feature generator parameters for the two groups. effect_scale
// interpolates the depressed parameters toward the healthy ones, so a single
// spec yields planted-effect (scale 1), amplified, or null (scale 0) cohorts.
struct GroupFeatureSpec {
  double depressed_mean = 0.0;
  double depressed_sd = 0.0;
  double healthy_mean = 0.0;
  double healthy_sd = 0.0;

  double mean(Group g, double effect_scale) const {
    if (g == Group::healthy) return healthy_mean;
    return healthy_mean + effect_scale * (depressed_mean - healthy_mean);
  }
  double sd(Group g) const { return g == Group::depressed ? depressed_sd : healthy_sd; }

  void validate(const std::string& name) const {
    if (depressed_sd < 0.0 || healthy_sd < 0.0) {
      throw ValidationError("cohort spec: negative sd for feature '" + name + "'");
    }
  }
};

struct CohortSpec {
  int depressed_users = 71;
  int healthy_users = 95;
  int below_cutoff_users = 0;  // extra depressed with CES-D <= 21
  int low_activity_users = 0;  // extra users with fewer than 5 posts

  // posts per user: lognormal, clamped to [5, max_posts_per_user]
  double posting_log_mean = 4.81;
  double posting_log_sd = 1.24;
  int max_posts_per_user = 3000;

  Date start_date{2013, 1, 1};
  Date end_date{2016, 4, 6};
  Date diagnosis_start{2014, 6, 1};
  Date diagnosis_end{2015, 12, 31};

  double effect_scale = 1.0;

  // per-post color features (normal, clamped to [0,1])
  GroupFeatureSpec hue{0.345, 0.162, 0.338, 0.157};
  GroupFeatureSpec saturation{0.338, 0.157, 0.347, 0.155};
  GroupFeatureSpec brightness{0.535, 0.138, 0.547, 0.145};

  // engagement: comments Poisson(mean); likes lognormal(log_mean, log_sd)
  GroupFeatureSpec comments{1.077, 0.0, 0.992, 0.0};
  GroupFeatureSpec likes_log{2.2, 1.1, 2.4, 1.1};

  // posting intensity: mean posts on an active day
  GroupFeatureSpec posts_per_day{1.875, 0.0, 1.667, 0.0};

  // faces: P(photo has a face), extra faces via Poisson when present
  GroupFeatureSpec face_prob{0.45, 0.0, 0.38, 0.0};
  GroupFeatureSpec face_extra{0.30, 0.0, 0.55, 0.0};

  // filters: probability a photo is filtered, plus per-name preference weights
  GroupFeatureSpec filter_prob{0.38, 0.0, 0.46, 0.0};
  std::vector<std::string> filter_names = {"Inkwell", "Valencia", "Clarendon", "Juno",
                                           "Lark",    "Gingham",  "Lo-Fi",    "Amaro"};
  std::vector<double> filter_weights_depressed = {0.30, 0.04, 0.12, 0.10, 0.10, 0.10, 0.14, 0.10};
  std::vector<double> filter_weights_healthy = {0.04, 0.30, 0.12, 0.10, 0.10, 0.10, 0.04, 0.20};

  // human ratings of the rated-photo subset
  bool ratings_enabled = true;
  int raters_per_photo = 3;
  int rater_pool = 50;
  double rating_latent_loading = 0.8;  // shared per-photo component
  double rating_noise_sd = 0.55;       // per-rater noise
  GroupFeatureSpec rating_happy{2.300, 0.0, 2.511, 0.0};
  GroupFeatureSpec rating_sad{0.840, 0.0, 0.757, 0.0};
  GroupFeatureSpec rating_likable{2.393, 0.0, 2.514, 0.0};
  GroupFeatureSpec rating_interesting{2.316, 0.0, 2.367, 0.0};

  void validate() const {
    if (depressed_users < 0 || healthy_users < 0 || below_cutoff_users < 0 ||
        low_activity_users < 0) {
      throw ValidationError("cohort spec: negative user count");
    }
    if (posting_log_sd < 0) throw ValidationError("cohort spec: negative posting_log_sd");
    if (!(start_date < end_date)) throw ValidationError("cohort spec: empty date range");
    if (!(diagnosis_start < diagnosis_end)) {
      throw ValidationError("cohort spec: empty diagnosis window");
    }
    if (effect_scale < 0) throw ValidationError("cohort spec: negative effect_scale");
    hue.validate("hue");
    saturation.validate("saturation");
    brightness.validate("brightness");
    comments.validate("comments");
    likes_log.validate("likes_log");
    posts_per_day.validate("posts_per_day");
    face_prob.validate("face_prob");
    face_extra.validate("face_extra");
    filter_prob.validate("filter_prob");
    if (filter_names.empty() || filter_weights_depressed.size() != filter_names.size() ||
        filter_weights_healthy.size() != filter_names.size()) {
      throw ValidationError("cohort spec: filter weight lists must match filter_names");
    }
    if (raters_per_photo < 1 || rater_pool < raters_per_photo) {
      throw ValidationError("cohort spec: rater pool smaller than raters_per_photo");
    }
    if (rating_noise_sd < 0 || rating_latent_loading < 0) {
      throw ValidationError("cohort spec: negative rating noise parameters");
    }
  }

  // Small cohort for fast tests: ~40 users, a few thousand user-days.
  static CohortSpec desk_scale() {
    CohortSpec s;
    s.depressed_users = 16;
    s.healthy_users = 24;
    s.posting_log_mean = 4.3;
    s.posting_log_sd = 0.8;
    return s;
  }

  // Widely separated group means with Table-S2-like sds; classifiers must
  // recover the planted effect.
  static CohortSpec strong_effect_desk() {
    CohortSpec s = desk_scale();
    s.hue = {0.58, 0.16, 0.34, 0.16};
    s.saturation = {0.22, 0.15, 0.42, 0.15};
    s.brightness = {0.38, 0.14, 0.60, 0.14};
    s.comments = {2.8, 0.0, 0.9, 0.0};
    s.likes_log = {1.7, 1.0, 2.6, 1.0};
    s.posts_per_day = {2.4, 0.0, 1.4, 0.0};
    s.face_prob = {0.62, 0.0, 0.30, 0.0};
    s.face_extra = {0.2, 0.0, 0.9, 0.0};
    s.filter_prob = {0.25, 0.0, 0.55, 0.0};
    return s;
  }

  // Balanced null cohort: both groups share one distribution, class shares
  // stay near one half, so chance-level classifiers score near 0.5.
  static CohortSpec null_effect_desk() {
    CohortSpec s = desk_scale();
    s.depressed_users = 20;
    s.healthy_users = 20;
    s.posting_log_sd = 0.3;
    s.effect_scale = 0.0;
    return s;
  }
};

struct SynthCohort {
  std::vector<Participant> participants;
  std::vector<Post> posts;
  std::vector<Rating> ratings;
  OrderedJson ground_truth;
};

namespace detail {

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

inline std::string pick_filter(const CohortSpec& spec, Group g, Rng& rng) {
  // interpolate depressed preferences toward healthy under effect_scale
  std::vector<double> w(spec.filter_names.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double h = spec.filter_weights_healthy[i];
    const double d = spec.filter_weights_depressed[i];
    w[i] = (g == Group::healthy) ? h : h + spec.effect_scale * (d - h);
    w[i] = std::max(0.0, w[i]);
    total += w[i];
  }
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return spec.filter_names[i];
  }
  return spec.filter_names.back();
}

}  // namespace detail

// Deterministic synthetic cohort. Per-participant RNG streams are derived
// from (seed, participant index) so output never depends on container
// iteration order; the same seed reproduces the same bytes.
inline SynthCohort generate_cohort(const CohortSpec& spec, std::uint64_t seed) {
  spec.validate();
  SynthCohort cohort;

  const std::int64_t range_start = day_number(spec.start_date) * 86400;
  const std::int64_t range_end = day_number(spec.end_date) * 86400;
  const std::int64_t diag_start_day = day_number(spec.diagnosis_start);
  const std::int64_t diag_end_day = day_number(spec.diagnosis_end);
  const std::int64_t total_days = (range_end - range_start) / 86400;

  struct Plan {
    Group group;
    bool below_cutoff = false;
    bool low_activity = false;
  };
  std::vector<Plan> plans;
  for (int i = 0; i < spec.depressed_users; ++i) plans.push_back({Group::depressed});
  for (int i = 0; i < spec.below_cutoff_users; ++i) plans.push_back({Group::depressed, true});
  for (int i = 0; i < spec.healthy_users; ++i) plans.push_back({Group::healthy});
  for (int i = 0; i < spec.low_activity_users; ++i) {
    plans.push_back({i % 2 ? Group::depressed : Group::healthy, false, true});
  }

  for (std::size_t u = 0; u < plans.size(); ++u) {
    const Plan& plan = plans[u];
    Rng rng(derive_seed(seed, 1000 + u));
    Participant participant;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "u%04zu", u);
    participant.id = idbuf;
    participant.group = plan.group;
    if (plan.group == Group::depressed) {
      participant.cesd_score =
          plan.below_cutoff ? static_cast<int>(rng.uniform_int(22))            // 0..21
                            : 22 + static_cast<int>(rng.uniform_int(39));      // 22..60
      const std::int64_t diag_day =
          diag_start_day + static_cast<std::int64_t>(
                               rng.uniform_int(static_cast<std::uint64_t>(diag_end_day - diag_start_day + 1)));
      participant.diagnosis_date = civil_from_days(diag_day);
      participant.age = std::max(19.0, std::min(55.0, rng.normal(28.8, 7.09)));
    } else {
      participant.age = std::max(19.0, std::min(55.0, rng.normal(30.7, 7.0)));
    }

    // posting plan: lognormal total posts, grouped into active days
    int n_posts;
    if (plan.low_activity) {
      n_posts = 1 + static_cast<int>(rng.uniform_int(4));  // 1..4, below admission floor
    } else {
      const double raw = std::exp(rng.normal(spec.posting_log_mean, spec.posting_log_sd));
      n_posts = static_cast<int>(std::lround(raw));
      n_posts = std::max(5, std::min(spec.max_posts_per_user, n_posts));
    }
    const double day_rate = std::max(1.0, spec.posts_per_day.mean(plan.group, spec.effect_scale));
    const int n_days = std::max(1, static_cast<int>(std::lround(n_posts / day_rate)));

    std::set<std::int64_t> active_days;
    while (static_cast<int>(active_days.size()) < std::min<std::int64_t>(n_days, total_days)) {
      active_days.insert(rng.uniform_int(static_cast<std::uint64_t>(total_days)));
    }

    int emitted = 0;
    int post_counter = 0;
    // round-robin over the active days until the planned count is reached, so
    // a short day plan can never drop a user below the admission floor
    std::vector<std::int64_t> day_plan(active_days.begin(), active_days.end());
    std::vector<int> per_day(day_plan.size(), 0);
    for (std::size_t di = 0; emitted < n_posts; di = (di + 1) % day_plan.size()) {
      const bool first_pass = per_day[di] == 0;
      int today = first_pass ? 1 + rng.poisson(day_rate - 1.0) : 1;
      today = std::min(today, n_posts - emitted);
      per_day[di] += today;
      const std::int64_t day_offset = day_plan[di];
      for (int k = 0; k < today; ++k) {
        Post post;
        post.id = participant.id + "#" + std::to_string(post_counter++);
        post.participant_id = participant.id;
        post.timestamp = range_start + day_offset * 86400 +
                         static_cast<std::int64_t>(rng.uniform_int(86400));
        post.comment_count = rng.poisson(spec.comments.mean(plan.group, spec.effect_scale));
        post.like_count = static_cast<int>(std::lround(
            std::exp(rng.normal(spec.likes_log.mean(plan.group, spec.effect_scale),
                                spec.likes_log.sd(plan.group)))));
        if (rng.uniform() < spec.filter_prob.mean(plan.group, spec.effect_scale)) {
          post.filter_name = detail::pick_filter(spec, plan.group, rng);
        } else {
          post.filter_name = kNoFilter;
        }
        imaging::ImageFeatures f;
        f.mean_hue = detail::clamp01(rng.normal(spec.hue.mean(plan.group, spec.effect_scale),
                                                spec.hue.sd(plan.group)));
        f.mean_saturation = detail::clamp01(rng.normal(
            spec.saturation.mean(plan.group, spec.effect_scale), spec.saturation.sd(plan.group)));
        f.mean_brightness = detail::clamp01(rng.normal(
            spec.brightness.mean(plan.group, spec.effect_scale), spec.brightness.sd(plan.group)));
        if (rng.uniform() < spec.face_prob.mean(plan.group, spec.effect_scale)) {
          f.face_count = 1 + rng.poisson(spec.face_extra.mean(plan.group, spec.effect_scale));
        } else {
          f.face_count = 0;
        }
        f.has_face = f.face_count >= 1;
        post.features = f;
        cohort.posts.push_back(std::move(post));
        ++emitted;
      }
    }
    cohort.participants.push_back(std::move(participant));
  }

  // human ratings for the rated subset, via the real selection rule
  if (spec.ratings_enabled) {
    std::map<std::string, Date> participation;
    for (const auto& p : cohort.participants) {
      if (p.group == Group::healthy) participation[p.id] = spec.end_date;
    }
    std::vector<std::string> rated = select_rating_subset(cohort.posts, cohort.participants,
                                                          participation);
    std::sort(rated.begin(), rated.end());
    std::map<std::string, Group> group_of;
    for (const auto& p : cohort.participants) group_of[p.id] = p.group;
    std::map<std::string, std::string> owner;
    for (const auto& post : cohort.posts) owner[post.id] = post.participant_id;

    for (std::size_t pi = 0; pi < rated.size(); ++pi) {
      const std::string& post_id = rated[pi];
      const Group g = group_of.at(owner.at(post_id));
      Rng rng(derive_seed(seed, 5'000'000 + pi));
      const double latent = rng.normal();
      std::set<std::uint64_t> raters;
      while (static_cast<int>(raters.size()) < spec.raters_per_photo) {
        raters.insert(rng.uniform_int(static_cast<std::uint64_t>(spec.rater_pool)));
      }
      for (std::uint64_t rater : raters) {
        auto draw = [&](const GroupFeatureSpec& cat) {
          const double v = cat.mean(g, spec.effect_scale) + spec.rating_latent_loading * latent +
                           rng.normal(0.0, spec.rating_noise_sd);
          return std::min(5.0, std::max(0.0, v));
        };
        Rating r;
        r.post_id = post_id;
        r.rater_id = "r" + std::to_string(rater);
        r.happy = draw(spec.rating_happy);
        r.sad = draw(spec.rating_sad);
        r.likable = draw(spec.rating_likable);
        r.interesting = draw(spec.rating_interesting);
        cohort.ratings.push_back(std::move(r));
      }
    }
  }

  // ground truth: labels plus the effective planted separations
  OrderedJson truth;
  truth["seed"] = seed;
  truth["effect_scale"] = spec.effect_scale;
  OrderedJson planted;
  auto plant = [&](const char* name, const GroupFeatureSpec& f) {
    planted[name] = OrderedJson{{"depressed_mean", f.mean(Group::depressed, spec.effect_scale)},
                                {"healthy_mean", f.mean(Group::healthy, spec.effect_scale)},
                                {"depressed_sd", f.sd(Group::depressed)},
                                {"healthy_sd", f.sd(Group::healthy)}};
  };
  plant("hue", spec.hue);
  plant("saturation", spec.saturation);
  plant("brightness", spec.brightness);
  plant("comments", spec.comments);
  plant("likes_log", spec.likes_log);
  plant("posts_per_day", spec.posts_per_day);
  plant("face_prob", spec.face_prob);
  plant("filter_prob", spec.filter_prob);
  truth["planted_effects"] = planted;
  OrderedJson labels;
  for (const auto& p : cohort.participants) labels[p.id] = group_name(p.group);
  truth["labels"] = labels;
  cohort.ground_truth = truth;
  return cohort;
}

// ---------------------------------------------------------------------------
// spec JSON (all fields optional; defaults above)
// ---------------------------------------------------------------------------

inline CohortSpec parse_cohort_spec(const Json& j) {
  CohortSpec s;
  auto get_int = [&](const char* name, int& out) {
    if (j.contains(name)) out = j.at(name).get<int>();
  };
  auto get_double = [&](const char* name, double& out) {
    if (j.contains(name)) out = j.at(name).get<double>();
  };
  auto get_date = [&](const char* name, Date& out) {
    if (j.contains(name)) out = parse_date(j.at(name).get<std::string>());
  };
  auto get_feature = [&](const char* name, GroupFeatureSpec& out) {
    if (!j.contains(name)) return;
    const auto& f = j.at(name);
    if (f.contains("depressed_mean")) out.depressed_mean = f.at("depressed_mean").get<double>();
    if (f.contains("depressed_sd")) out.depressed_sd = f.at("depressed_sd").get<double>();
    if (f.contains("healthy_mean")) out.healthy_mean = f.at("healthy_mean").get<double>();
    if (f.contains("healthy_sd")) out.healthy_sd = f.at("healthy_sd").get<double>();
  };

  get_int("depressed_users", s.depressed_users);
  get_int("healthy_users", s.healthy_users);
  get_int("below_cutoff_users", s.below_cutoff_users);
  get_int("low_activity_users", s.low_activity_users);
  get_double("posting_log_mean", s.posting_log_mean);
  get_double("posting_log_sd", s.posting_log_sd);
  get_int("max_posts_per_user", s.max_posts_per_user);
  get_date("start_date", s.start_date);
  get_date("end_date", s.end_date);
  get_date("diagnosis_start", s.diagnosis_start);
  get_date("diagnosis_end", s.diagnosis_end);
  get_double("effect_scale", s.effect_scale);
  get_feature("hue", s.hue);
  get_feature("saturation", s.saturation);
  get_feature("brightness", s.brightness);
  get_feature("comments", s.comments);
  get_feature("likes_log", s.likes_log);
  get_feature("posts_per_day", s.posts_per_day);
  get_feature("face_prob", s.face_prob);
  get_feature("face_extra", s.face_extra);
  get_feature("filter_prob", s.filter_prob);
  if (j.contains("filter_names")) {
    s.filter_names = j.at("filter_names").get<std::vector<std::string>>();
    s.filter_weights_depressed = j.at("filter_weights_depressed").get<std::vector<double>>();
    s.filter_weights_healthy = j.at("filter_weights_healthy").get<std::vector<double>>();
  }
  if (j.contains("ratings_enabled")) s.ratings_enabled = j.at("ratings_enabled").get<bool>();
  get_int("raters_per_photo", s.raters_per_photo);
  get_int("rater_pool", s.rater_pool);
  get_double("rating_latent_loading", s.rating_latent_loading);
  get_double("rating_noise_sd", s.rating_noise_sd);
  get_feature("rating_happy", s.rating_happy);
  get_feature("rating_sad", s.rating_sad);
  get_feature("rating_likable", s.rating_likable);
  get_feature("rating_interesting", s.rating_interesting);
  s.validate();
  return s;
}

}  // namespace photoscreen::cohort
