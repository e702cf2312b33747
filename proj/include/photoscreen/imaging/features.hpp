#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "photoscreen/imaging/codec.hpp"
#include "photoscreen/imaging/color.hpp"
#include "photoscreen/imaging/detect.hpp"

namespace photoscreen::imaging {

struct ImageFeatures {
  double mean_hue = 0.0;
  double mean_saturation = 0.0;
  double mean_brightness = 0.0;
  int face_count = 0;
  bool has_face = false;
};

inline ImageFeatures extract_features(const RgbImage& image, const CascadeModel& cascade,
                                      const DetectionParams& params = {}) {
  const MeanHsv hsv = mean_hsv(image);
  const std::vector<Box> boxes = detect_faces(image, cascade, params);
  ImageFeatures f;
  f.mean_hue = hsv.mean_hue;
  f.mean_saturation = hsv.mean_saturation;
  f.mean_brightness = hsv.mean_brightness;
  f.face_count = static_cast<int>(boxes.size());
  f.has_face = f.face_count >= 1;
  return f;
}

// Per-photo result for batch extraction; decode or processing failures are
// captured per photo so one corrupt file never sinks the batch.
struct PhotoResult {
  std::string photo_id;
  bool ok = false;
  ImageFeatures features;
  std::string error;
};

struct PhotoInput {
  std::string photo_id;
  std::string path;
};

inline std::vector<PhotoResult> extract_features_batch(const std::vector<PhotoInput>& photos,
                                                       const CascadeModel& cascade,
                                                       const DetectionParams& params = {}) {
  std::vector<PhotoResult> out;
  out.reserve(photos.size());
  for (const auto& in : photos) {
    PhotoResult r;
    r.photo_id = in.photo_id;
    try {
      const RgbImage img = decode_image_file(in.path);
      r.features = extract_features(img, cascade, params);
      r.ok = true;
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Human ground truth for one photo in the detector calibration corpus.
struct PhotoAnnotation {
  std::string group;  // "depressed" | "healthy"
  bool has_face = false;
  int face_count = 0;
};

struct AccuracyCell {
  std::string group;
  bool detected = false;  // detector verdict for this cell
  int total = 0;
  int correct = 0;

  double accuracy() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
};

struct GroupCountDiff {
  std::string group;
  int n = 0;
  double mean_diff = 0.0;  // detected minus actual
  double sd_diff = 0.0;
};

struct DetectorAccuracyReport {
  std::vector<AccuracyCell> cells;  // (group x detected/undetected), fixed order
  std::vector<GroupCountDiff> count_diffs;
  int exclusions = 0;  // photos missing an annotation

  std::string format_text() const {
    std::string out = "Face detection accuracy:\n";
    for (const auto& c : cells) {
      std::string group = c.group;
      if (!group.empty()) group[0] = static_cast<char>(std::toupper(group[0]));
      out += group + (c.detected ? ", 1+ faces detected: " : ", No face detected: ");
      out += std::to_string(static_cast<int>(std::lround(c.accuracy() * 100.0)));
      out += "% accurate";
      out += " (" + std::to_string(c.correct) + "/" + std::to_string(c.total) + ")\n";
    }
    for (const auto& d : count_diffs) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "Mean count difference (detected - actual), %s: mu = %.3f, sigma = %.2f\n",
                    d.group.c_str(), d.mean_diff, d.sd_diff);
      out += buf;
    }
    if (exclusions > 0) out += "Excluded (missing annotation): " + std::to_string(exclusions) + "\n";
    return out;
  }
};

// Detector-vs-human agreement in the Appendix-style 4-cell layout: accuracy
// within each (group, detector verdict) cell is the rate at which the human
// annotation agrees with the verdict.
inline DetectorAccuracyReport detector_accuracy_report(
    const std::map<std::string, int>& detected_counts,
    const std::map<std::string, PhotoAnnotation>& annotations) {
  DetectorAccuracyReport report;
  report.cells = {{"depressed", false}, {"healthy", false}, {"depressed", true}, {"healthy", true}};
  std::map<std::string, std::vector<double>> diffs;

  for (const auto& [photo_id, count] : detected_counts) {
    auto it = annotations.find(photo_id);
    if (it == annotations.end()) {
      ++report.exclusions;
      continue;
    }
    const PhotoAnnotation& ann = it->second;
    const bool detected = count >= 1;
    for (auto& cell : report.cells) {
      if (cell.group == ann.group && cell.detected == detected) {
        ++cell.total;
        if (ann.has_face == detected) ++cell.correct;
      }
    }
    diffs[ann.group].push_back(static_cast<double>(count - ann.face_count));
  }

  for (const auto& [group, d] : diffs) {
    GroupCountDiff g;
    g.group = group;
    g.n = static_cast<int>(d.size());
    double sum = 0.0;
    for (double v : d) sum += v;
    g.mean_diff = sum / g.n;
    if (g.n > 1) {
      double ss = 0.0;
      for (double v : d) ss += (v - g.mean_diff) * (v - g.mean_diff);
      g.sd_diff = std::sqrt(ss / (g.n - 1));
    }
    report.count_diffs.push_back(g);
  }
  return report;
}

}  // namespace photoscreen::imaging
