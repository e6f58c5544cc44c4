#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"

namespace fbi::cli {

using Json = nlohmann::ordered_json;

// Writes <dir>/<name>.json. Key order is insertion order, doubles round-trip exactly.
std::string write_json(const std::string& dir, const std::string& name, const Json& doc);

// Timing metadata kept apart from the report so reports stay byte-identical across runs.
std::string write_meta(const std::string& dir, const std::string& name, std::chrono::system_clock::time_point start,
                       std::chrono::system_clock::time_point end, const Json& extra = Json::object());

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<double>& values);
  std::string str() const { return text_; }
  // Writes <dir>/<name>.csv.
  std::string save(const std::string& dir, const std::string& name) const;

 private:
  std::size_t columns_;
  std::string text_;
};

// %.17g
std::string format_double(double v);

}  // namespace fbi::cli
