#include "fbi_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "fbi/errors.hpp"

namespace fbi::cli {

namespace fs = std::filesystem;

namespace {

std::string write_text(const std::string& dir, const std::string& file, const std::string& text) {
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / file;
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  f << text;
  return p.string();
}

std::string iso8601(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string write_json(const std::string& dir, const std::string& name, const Json& doc) {
  return write_text(dir, name + ".json", doc.dump(2) + "\n");
}

std::string write_meta(const std::string& dir, const std::string& name, std::chrono::system_clock::time_point start,
                       std::chrono::system_clock::time_point end, const Json& extra) {
  Json meta;
  meta["report"] = name + ".json";
  meta["started"] = iso8601(start);
  meta["finished"] = iso8601(end);
  meta["seconds"] = std::chrono::duration<double>(end - start).count();
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  return write_text(dir, name + ".meta.json", meta.dump(2) + "\n");
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw Error("csv row has the wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ",";
    // Integral columns (indices) print without an exponent.
    const double v = values[i];
    if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15)
      text_ += std::to_string(static_cast<long long>(v));
    else
      text_ += format_double(v);
  }
  text_ += "\n";
  return *this;
}

std::string CsvWriter::save(const std::string& dir, const std::string& name) const {
  return write_text(dir, name + ".csv", text_);
}

}  // namespace fbi::cli
