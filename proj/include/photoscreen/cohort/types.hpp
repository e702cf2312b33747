#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "photoscreen/common/error.hpp"
#include "photoscreen/imaging/features.hpp"

namespace photoscreen::cohort {

enum class Group { healthy = 0, depressed = 1 };

inline std::string group_name(Group g) { return g == Group::depressed ? "depressed" : "healthy"; }

inline Group parse_group(const std::string& s) {
  if (s == "depressed") return Group::depressed;
  if (s == "healthy") return Group::healthy;
  throw ValidationError("unknown group '" + s + "'");
}

// ---------------------------------------------------------------------------
// calendar dates (proleptic Gregorian, days since 1970-01-01)
// ---------------------------------------------------------------------------

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline Date civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m), static_cast<int>(d)};
}

inline std::int64_t day_number(const Date& d) { return days_from_civil(d.year, d.month, d.day); }

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

inline Date parse_date(const std::string& s) {
  int y = 0, m = 0, d = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
      d > 31) {
    throw ValidationError("bad date '" + s + "' (expected YYYY-MM-DD)");
  }
  return {y, m, d};
}

// RFC 3339 timestamp -> UTC epoch seconds. Fractional seconds are truncated.
inline std::int64_t parse_rfc3339(const std::string& s) {
  int y, mo, d, h, mi, se;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &se,
                  &consumed) != 6) {
    throw ValidationError("bad timestamp '" + s + "' (expected RFC 3339)");
  }
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  std::int64_t offset = 0;
  if (pos >= s.size()) throw ValidationError("timestamp '" + s + "' missing timezone");
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int oh = 0, om = 0;
    if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2) {
      throw ValidationError("bad timezone offset in '" + s + "'");
    }
    offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
    pos += 6;
  } else {
    throw ValidationError("bad timezone in '" + s + "'");
  }
  if (pos != s.size()) throw ValidationError("trailing characters in timestamp '" + s + "'");
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 ||
      se > 60) {
    throw ValidationError("timestamp '" + s + "' out of range");
  }
  return days_from_civil(y, mo, d) * 86400LL + h * 3600LL + mi * 60LL + se - offset;
}

inline std::string format_rfc3339(std::int64_t epoch) {
  std::int64_t days = epoch / 86400;
  std::int64_t rem = epoch % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const Date d = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                static_cast<int>(rem % 60));
  return buf;
}

// UTC calendar date of a timestamp; the user-day boundary.
inline Date utc_date(std::int64_t epoch) {
  std::int64_t days = epoch / 86400;
  if (epoch % 86400 < 0) --days;
  return civil_from_days(days);
}

// ---------------------------------------------------------------------------
// records
// ---------------------------------------------------------------------------

struct Participant {
  std::string id;
  Group group = Group::healthy;
  std::optional<Date> diagnosis_date;  // required iff depressed
  std::optional<int> cesd_score;       // required iff depressed
  std::optional<double> age;

  void validate() const {
    if (id.empty()) throw ValidationError("participant with empty id");
    if (group == Group::depressed) {
      if (!diagnosis_date) {
        throw ValidationError("participant '" + id + "': depressed without diagnosis_date");
      }
      if (!cesd_score) {
        throw ValidationError("participant '" + id + "': depressed without CES-D score");
      }
    }
    if (cesd_score && (*cesd_score < 0 || *cesd_score > 60)) {
      throw ValidationError("participant '" + id + "': CES-D score outside 0-60");
    }
  }
};

inline constexpr const char* kNoFilter = "Normal";

struct Post {
  std::string id;  // synthesized as "<participant>#<n>" when the input lacks one
  std::string participant_id;
  std::int64_t timestamp = 0;  // UTC epoch seconds
  int like_count = 0;
  int comment_count = 0;
  std::string filter_name = kNoFilter;
  std::optional<std::string> image_path;
  std::optional<imaging::ImageFeatures> features;

  bool has_filter() const { return filter_name != kNoFilter; }
  Date date() const { return utc_date(timestamp); }
};

struct Rating {
  std::string post_id;
  std::string rater_id;
  double happy = 0.0;
  double sad = 0.0;
  double likable = 0.0;
  double interesting = 0.0;

  void validate() const {
    for (double v : {happy, sad, likable, interesting}) {
      if (v < 0.0 || v > 5.0) {
        throw ValidationError("rating for post '" + post_id + "' outside [0,5]");
      }
    }
  }
};

struct RatingMeans {
  double happy = 0.0;
  double sad = 0.0;
  double likable = 0.0;
  double interesting = 0.0;
  int rated_posts = 0;
};

// One participant-day: the regression / classification observation unit.
struct UserDay {
  std::string participant_id;
  Date date;
  Group target = Group::healthy;
  int posts_per_day = 0;
  double mean_hue = 0.0;
  double mean_saturation = 0.0;
  double mean_brightness = 0.0;
  double comments = 0.0;  // mean per post
  double likes = 0.0;     // mean per post
  int filtered_count = 0;
  int face_post_count = 0;
  double mean_face_count = 0.0;
  std::optional<RatingMeans> ratings;
};

}  // namespace photoscreen::cohort
