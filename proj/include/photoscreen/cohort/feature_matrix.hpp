#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "photoscreen/cohort/types.hpp"
#include "photoscreen/common/csv.hpp"
#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"

namespace photoscreen::cohort {

// Observations-by-features design data plus the binary target. When a matrix
// has been standardized the per-column means/sds are retained so values can
// be mapped back.
struct FeatureMatrix {
  std::vector<std::string> observation_ids;
  std::vector<std::string> feature_names;
  Mat values;               // rows x features
  std::vector<int> target;  // 1 = depressed

  struct Standardization {
    std::vector<double> mean;
    std::vector<double> sd;
    bool population = true;  // 1/n convention
  };
  std::optional<Standardization> standardization;

  std::size_t rows() const { return values.rows; }
  std::size_t cols() const { return values.cols; }

  void validate() const {
    if (values.rows != target.size()) throw ValidationError("rows do not match targets");
    if (values.cols != feature_names.size()) {
      throw ValidationError("columns do not match feature names");
    }
    if (!observation_ids.empty() && observation_ids.size() != values.rows) {
      throw ValidationError("observation ids do not match rows");
    }
  }
};

// Column z-scores. Population (1/n) sd by default; the convention is recorded
// in the standardization block either way.
inline FeatureMatrix standardize(const FeatureMatrix& input, bool population_sd = true) {
  input.validate();
  const std::size_t n = input.rows();
  const std::size_t k = input.cols();
  if (n < 2) throw ValidationError("standardize requires at least 2 rows");

  FeatureMatrix out = input;
  FeatureMatrix::Standardization stz;
  stz.population = population_sd;
  stz.mean.resize(k);
  stz.sd.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += input.values(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = input.values(i, j) - mean;
      ss += d * d;
    }
    const double denom = population_sd ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double sd = std::sqrt(ss / denom);
    if (sd == 0.0) {
      throw ValidationError("zero-variance column '" + input.feature_names[j] + "'");
    }
    stz.mean[j] = mean;
    stz.sd[j] = sd;
    for (std::size_t i = 0; i < n; ++i) out.values(i, j) = (input.values(i, j) - mean) / sd;
  }
  out.standardization = stz;
  return out;
}

inline FeatureMatrix inverse_standardize(const FeatureMatrix& input) {
  if (!input.standardization) throw ValidationError("matrix carries no standardization record");
  FeatureMatrix out = input;
  const auto& stz = *input.standardization;
  for (std::size_t j = 0; j < input.cols(); ++j) {
    for (std::size_t i = 0; i < input.rows(); ++i) {
      out.values(i, j) = input.values(i, j) * stz.sd[j] + stz.mean[j];
    }
  }
  out.standardization.reset();
  return out;
}

inline const std::vector<std::string>& computational_feature_names() {
  static const std::vector<std::string> names = {
      "hue",     "saturation", "brightness", "comments",  "likes",
      "posts_per_day", "filtered",   "face_posts", "face_count"};
  return names;
}

inline const std::vector<std::string>& rating_feature_names() {
  static const std::vector<std::string> names = {"happy", "sad", "likable", "interesting"};
  return names;
}

inline std::string user_day_id(const UserDay& d) {
  return d.participant_id + "/" + format_date(d.date);
}

// Design data for the main models: one row per user-day, the nine
// computational predictors.
inline FeatureMatrix feature_matrix_from_user_days(const std::vector<UserDay>& days) {
  FeatureMatrix m;
  m.feature_names = computational_feature_names();
  m.values = Mat(days.size(), m.feature_names.size());
  m.target.resize(days.size());
  m.observation_ids.reserve(days.size());
  for (std::size_t i = 0; i < days.size(); ++i) {
    const UserDay& d = days[i];
    m.observation_ids.push_back(user_day_id(d));
    m.values(i, 0) = d.mean_hue;
    m.values(i, 1) = d.mean_saturation;
    m.values(i, 2) = d.mean_brightness;
    m.values(i, 3) = d.comments;
    m.values(i, 4) = d.likes;
    m.values(i, 5) = d.posts_per_day;
    m.values(i, 6) = d.filtered_count;
    m.values(i, 7) = d.face_post_count;
    m.values(i, 8) = d.mean_face_count;
    m.target[i] = d.target == Group::depressed ? 1 : 0;
  }
  return m;
}

// Ratings model design data: user-days that have at least one rated post.
inline FeatureMatrix rating_matrix_from_user_days(const std::vector<UserDay>& days) {
  FeatureMatrix m;
  m.feature_names = rating_feature_names();
  std::size_t n = 0;
  for (const auto& d : days) n += d.ratings.has_value() ? 1 : 0;
  m.values = Mat(n, m.feature_names.size());
  m.target.reserve(n);
  std::size_t i = 0;
  for (const auto& d : days) {
    if (!d.ratings) continue;
    m.observation_ids.push_back(user_day_id(d));
    m.values(i, 0) = d.ratings->happy;
    m.values(i, 1) = d.ratings->sad;
    m.values(i, 2) = d.ratings->likable;
    m.values(i, 3) = d.ratings->interesting;
    m.target.push_back(d.target == Group::depressed ? 1 : 0);
    ++i;
  }
  return m;
}

// CSV layout: observation_id, <features...>, target
inline std::string feature_matrix_to_csv(const FeatureMatrix& m) {
  m.validate();
  std::string out;
  std::vector<std::string> header = {"observation_id"};
  header.insert(header.end(), m.feature_names.begin(), m.feature_names.end());
  header.push_back("target");
  out += csv_row(header);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    row.push_back(m.observation_ids.empty() ? std::to_string(i) : m.observation_ids[i]);
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(format_double(m.values(i, j)));
    row.push_back(std::to_string(m.target[i]));
    out += csv_row(row);
  }
  return out;
}

inline FeatureMatrix feature_matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty feature matrix CSV");
  const auto header = csv_split(line);
  if (header.size() < 3 || header.front() != "observation_id" || header.back() != "target") {
    throw ValidationError("feature matrix CSV must be observation_id,<features...>,target");
  }
  FeatureMatrix m;
  m.feature_names.assign(header.begin() + 1, header.end() - 1);

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = csv_split(line);
    if (fields.size() != header.size()) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    m.observation_ids.push_back(fields.front());
    std::vector<double> row;
    for (std::size_t j = 1; j + 1 < fields.size(); ++j) {
      row.push_back(parse_double(fields[j], "line " + std::to_string(lineno)));
    }
    rows.push_back(std::move(row));
    const double t = parse_double(fields.back(), "line " + std::to_string(lineno));
    if (t != 0.0 && t != 1.0) {
      throw ValidationError("line " + std::to_string(lineno) + ": target must be 0 or 1");
    }
    m.target.push_back(static_cast<int>(t));
  }
  m.values = Mat(rows.size(), m.feature_names.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m.feature_names.size(); ++j) m.values(i, j) = rows[i][j];
  }
  m.validate();
  return m;
}

}  // namespace photoscreen::cohort
