#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/fsio.hpp"

namespace photoscreen::imaging {

// Weighted axis-aligned rectangle in base-window coordinates.
struct HaarRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double weight = 0.0;
};

struct WeakClassifier {
  std::vector<HaarRect> rects;
  double threshold = 0.0;
  double left = 0.0;   // vote when feature value < threshold
  double right = 0.0;  // vote otherwise
};

struct CascadeStage {
  double threshold = 0.0;
  std::vector<WeakClassifier> weak;
};

struct CascadeModel {
  int window_width = 0;
  int window_height = 0;
  std::vector<CascadeStage> stages;
};

struct DetectionParams {
  std::vector<double> scale_factors = {1.05, 1.4};
  int min_neighbors = 4;
  int min_width = 20;
  int min_height = 20;

  void validate() const {
    if (scale_factors.empty()) throw ValidationError("scale_factors must be non-empty");
    for (double f : scale_factors) {
      if (!(f > 1.0)) throw ValidationError("scale factors must be > 1");
    }
    if (min_neighbors < 0) throw ValidationError("min_neighbors must be >= 0");
    if (min_width < 1 || min_height < 1) throw ValidationError("min_size must be >= 1");
  }
};

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ValidationError("cascade: " + field + ": " + msg);
}

inline double num_at(const nlohmann::json& j, const std::string& field) {
  require(j.is_number(), field, "expected a number");
  return j.get<double>();
}

}  // namespace detail

// Parses and validates the cascade document:
//   {window: [w,h], stages: [{threshold, weak: [{rects: [[x,y,w,h,weight],...],
//    threshold, left, right}]}]}
// Every rectangle must fit inside the base window; violations name the field.
inline CascadeModel parse_cascade(const std::string& text) {
  using detail::num_at;
  using detail::require;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("cascade: invalid JSON: ") + e.what());
  }
  CascadeModel model;
  require(j.contains("window") && j["window"].is_array() && j["window"].size() == 2, "window",
          "expected [width, height]");
  model.window_width = static_cast<int>(num_at(j["window"][0], "window[0]"));
  model.window_height = static_cast<int>(num_at(j["window"][1], "window[1]"));
  require(model.window_width >= 1 && model.window_height >= 1, "window", "must be >= 1");

  require(j.contains("stages") && j["stages"].is_array() && !j["stages"].empty(), "stages",
          "must be a non-empty array");
  for (std::size_t si = 0; si < j["stages"].size(); ++si) {
    const std::string sp = "stages[" + std::to_string(si) + "]";
    const auto& sj = j["stages"][si];
    require(sj.is_object(), sp, "expected an object");
    CascadeStage stage;
    require(sj.contains("threshold"), sp + ".threshold", "missing");
    stage.threshold = num_at(sj["threshold"], sp + ".threshold");
    require(sj.contains("weak") && sj["weak"].is_array() && !sj["weak"].empty(), sp + ".weak",
            "must be a non-empty array");
    for (std::size_t wi = 0; wi < sj["weak"].size(); ++wi) {
      const std::string wp = sp + ".weak[" + std::to_string(wi) + "]";
      const auto& wj = sj["weak"][wi];
      WeakClassifier weak;
      require(wj.contains("rects") && wj["rects"].is_array() && !wj["rects"].empty(),
              wp + ".rects", "must be a non-empty array");
      for (std::size_t ri = 0; ri < wj["rects"].size(); ++ri) {
        const std::string rp = wp + ".rects[" + std::to_string(ri) + "]";
        const auto& rj = wj["rects"][ri];
        require(rj.is_array() && rj.size() == 5, rp, "expected [x,y,w,h,weight]");
        HaarRect rect;
        rect.x = static_cast<int>(num_at(rj[0], rp + "[0]"));
        rect.y = static_cast<int>(num_at(rj[1], rp + "[1]"));
        rect.w = static_cast<int>(num_at(rj[2], rp + "[2]"));
        rect.h = static_cast<int>(num_at(rj[3], rp + "[3]"));
        rect.weight = num_at(rj[4], rp + "[4]");
        require(rect.w >= 1 && rect.h >= 1, rp, "rectangle must have positive size");
        require(rect.x >= 0 && rect.y >= 0 && rect.x + rect.w <= model.window_width &&
                    rect.y + rect.h <= model.window_height,
                rp, "rectangle outside base window");
        weak.rects.push_back(rect);
      }
      require(wj.contains("threshold"), wp + ".threshold", "missing");
      weak.threshold = num_at(wj["threshold"], wp + ".threshold");
      require(wj.contains("left"), wp + ".left", "missing");
      weak.left = num_at(wj["left"], wp + ".left");
      require(wj.contains("right"), wp + ".right", "missing");
      weak.right = num_at(wj["right"], wp + ".right");
      stage.weak.push_back(weak);
    }
    model.stages.push_back(stage);
  }
  return model;
}

inline CascadeModel load_cascade(const std::string& path) {
  return parse_cascade(read_file_bytes(path));
}

}  // namespace photoscreen::imaging
