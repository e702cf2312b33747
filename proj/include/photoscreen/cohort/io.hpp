#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "photoscreen/cohort/admission.hpp"
#include "photoscreen/cohort/types.hpp"
#include "photoscreen/common/jsonl.hpp"

namespace photoscreen::cohort {

namespace detail {

inline ValidationError at_line(const std::filesystem::path& path, std::size_t line,
                               const std::string& msg) {
  return ValidationError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

template <typename T>
T field(const Json& j, const char* name, const std::filesystem::path& path, std::size_t line) {
  if (!j.contains(name)) throw at_line(path, line, std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw at_line(path, line, std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace detail

// participants.jsonl: {id, group, diagnosis_date?, cesd_responses?|cesd_score?, age?}
inline std::vector<Participant> read_participants(const std::filesystem::path& path) {
  std::vector<Participant> out;
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    Participant p;
    p.id = detail::field<std::string>(j, "id", path, line);
    try {
      p.group = parse_group(detail::field<std::string>(j, "group", path, line));
      if (j.contains("diagnosis_date")) {
        p.diagnosis_date = parse_date(j.at("diagnosis_date").get<std::string>());
      }
      if (j.contains("cesd_responses")) {
        const auto responses = detail::field<std::vector<int>>(j, "cesd_responses", path, line);
        p.cesd_score = score_cesd(responses);
      } else if (j.contains("cesd_score")) {
        p.cesd_score = detail::field<int>(j, "cesd_score", path, line);
      }
      if (j.contains("age") && !j.at("age").is_null()) {
        p.age = detail::field<double>(j, "age", path, line);
      }
      p.validate();
    } catch (const ValidationError& e) {
      throw detail::at_line(path, line, e.what());
    }
    out.push_back(std::move(p));
  });
  return out;
}

// posts.jsonl: {participant_id, timestamp, like_count, comment_count, filter,
// image_path?, id?, features?}. Posts without an explicit id get
// "<participant>#<running index>" in file order.
inline std::vector<Post> read_posts(const std::filesystem::path& path) {
  std::vector<Post> out;
  std::map<std::string, int> counters;
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    Post p;
    try {
      p.participant_id = detail::field<std::string>(j, "participant_id", path, line);
      p.timestamp = parse_rfc3339(detail::field<std::string>(j, "timestamp", path, line));
      p.like_count = detail::field<int>(j, "like_count", path, line);
      p.comment_count = detail::field<int>(j, "comment_count", path, line);
      p.filter_name = detail::field<std::string>(j, "filter", path, line);
      if (p.like_count < 0 || p.comment_count < 0) {
        throw ValidationError("negative like/comment count");
      }
      if (j.contains("id")) {
        p.id = j.at("id").get<std::string>();
      } else {
        p.id = p.participant_id + "#" + std::to_string(counters[p.participant_id]++);
      }
      if (j.contains("image_path") && !j.at("image_path").is_null()) {
        p.image_path = j.at("image_path").get<std::string>();
      }
      if (j.contains("features") && !j.at("features").is_null()) {
        const auto& f = j.at("features");
        imaging::ImageFeatures feat;
        feat.mean_hue = f.at("mean_hue").get<double>();
        feat.mean_saturation = f.at("mean_saturation").get<double>();
        feat.mean_brightness = f.at("mean_brightness").get<double>();
        feat.face_count = f.at("face_count").get<int>();
        feat.has_face = feat.face_count >= 1;
        p.features = feat;
      }
    } catch (const ValidationError& e) {
      throw detail::at_line(path, line, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw detail::at_line(path, line, e.what());
    }
    out.push_back(std::move(p));
  });
  return out;
}

// ratings.jsonl: {post_id, rater_id, happy, sad, likable, interesting}
inline std::vector<Rating> read_ratings(const std::filesystem::path& path) {
  std::vector<Rating> out;
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    Rating r;
    try {
      r.post_id = detail::field<std::string>(j, "post_id", path, line);
      r.rater_id = detail::field<std::string>(j, "rater_id", path, line);
      r.happy = detail::field<double>(j, "happy", path, line);
      r.sad = detail::field<double>(j, "sad", path, line);
      r.likable = detail::field<double>(j, "likable", path, line);
      r.interesting = detail::field<double>(j, "interesting", path, line);
      r.validate();
    } catch (const ValidationError& e) {
      throw detail::at_line(path, line, e.what());
    }
    out.push_back(std::move(r));
  });
  return out;
}

inline OrderedJson participant_to_json(const Participant& p) {
  OrderedJson j;
  j["id"] = p.id;
  j["group"] = group_name(p.group);
  if (p.diagnosis_date) j["diagnosis_date"] = format_date(*p.diagnosis_date);
  if (p.cesd_score) j["cesd_score"] = *p.cesd_score;
  if (p.age) j["age"] = *p.age;
  return j;
}

inline OrderedJson post_to_json(const Post& p) {
  OrderedJson j;
  j["id"] = p.id;
  j["participant_id"] = p.participant_id;
  j["timestamp"] = format_rfc3339(p.timestamp);
  j["like_count"] = p.like_count;
  j["comment_count"] = p.comment_count;
  j["filter"] = p.filter_name;
  if (p.image_path) j["image_path"] = *p.image_path;
  if (p.features) {
    j["features"] = OrderedJson{{"mean_hue", p.features->mean_hue},
                                {"mean_saturation", p.features->mean_saturation},
                                {"mean_brightness", p.features->mean_brightness},
                                {"face_count", p.features->face_count},
                                {"has_face", p.features->has_face}};
  }
  return j;
}

inline OrderedJson rating_to_json(const Rating& r) {
  OrderedJson j;
  j["post_id"] = r.post_id;
  j["rater_id"] = r.rater_id;
  j["happy"] = r.happy;
  j["sad"] = r.sad;
  j["likable"] = r.likable;
  j["interesting"] = r.interesting;
  return j;
}

}  // namespace photoscreen::cohort
