#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoscreen/common/error.hpp"

namespace photoscreen {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Streams a JSON-lines file, invoking fn(line_number, parsed) per record.
// Parse failures surface as ValidationError carrying the 1-based line number.
inline void for_each_jsonl(const std::filesystem::path& path,
                           const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open file: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": invalid JSON");
    }
    fn(lineno, j);
  }
}

template <typename T, typename F>
std::string to_jsonl(const std::vector<T>& records, F to_json) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace photoscreen
