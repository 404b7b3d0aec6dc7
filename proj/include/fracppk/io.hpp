#pragma once

// CSV and JSON serialization of tables, paths and fields. CSV files start with
// '#'-prefixed lines echoing every parameter; JSON documents carry "schema": 1.
// Files are written to a temporary sibling and renamed into place.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fracppk/errors.hpp"
#include "fracppk/fields.hpp"
#include "fracppk/processes.hpp"
#include "fracppk/subordinators.hpp"

namespace fracppk {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kJsonSchema = 1;

/// Shortest round-trip text for a double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Ordered (key, value) parameter echo.
using ParamList = std::vector<std::pair<std::string, std::string>>;

inline std::string csv_header(const std::string& command, const ParamList& params) {
  std::string out = "# fracppk " + std::string(kVersion) + "\n# command: " + command + "\n";
  for (const auto& [k, v] : params) out += "# " + k + ": " + v + "\n";
  return out;
}

inline nlohmann::json json_envelope(const std::string& command, const ParamList& params) {
  nlohmann::json j;
  j["schema"] = kJsonSchema;
  j["version"] = kVersion;
  j["command"] = command;
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["parameters"] = p;
  return j;
}

inline ParamList table_params(const PmfTable& t) {
  return {{"variant", to_string(t.variant)},
          {"k", std::to_string(t.order.k)},
          {"lambda", format_double(t.order.lambda)},
          {t.variant == Variant::Field ? "area" : "t", format_double(t.t)},
          {"alpha", format_double(t.frac.alpha)},
          {"beta", format_double(t.frac.beta)},
          {"nmax", std::to_string(t.probs.empty() ? 0 : t.probs.size() - 1)},
          {"truncation_mass", format_double(t.truncation_mass)}};
}

inline std::string pmf_rows_csv(const PmfTable& t) {
  std::string out = "n,prob\n";
  for (std::size_t n = 0; n < t.probs.size(); ++n) out += std::to_string(n) + "," + format_double(t.probs[n]) + "\n";
  return out;
}

inline std::string to_csv(const PmfTable& t) { return csv_header("pmf", table_params(t)) + pmf_rows_csv(t); }

inline nlohmann::json to_json(const PmfTable& t) {
  auto j = json_envelope("pmf", table_params(t));
  j["probs"] = t.probs;
  j["truncation_mass"] = t.truncation_mass;
  return j;
}

inline std::string to_csv(const PathSample& path, const ParamList& params) {
  std::string out = csv_header("path", params) + "time,value\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out += format_double(path.times[i]) + "," + format_double(path.values[i]) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const PathSample& path, const ParamList& params) {
  auto j = json_envelope("path", params);
  j["times"] = path.times;
  j["values"] = path.values;
  return j;
}

inline std::string marked_path_rows_csv(const MarkedEventPath& path, std::size_t run) {
  std::string out;
  for (std::size_t i = 0; i < path.event_times.size(); ++i) {
    out += std::to_string(run) + "," + format_double(path.event_times[i]) + "," + std::to_string(path.marks[i]) +
           "," + std::to_string(path.counts[i]) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const MarkedEventPath& path) {
  nlohmann::json j;
  j["horizon"] = path.horizon;
  j["times"] = path.event_times;
  j["marks"] = path.marks;
  j["counts"] = path.counts;
  return j;
}

inline std::string field_rows_csv(const MarkedPointField& f, std::size_t run) {
  std::string out;
  const std::size_t d = f.ambient.dim();
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += std::to_string(run);
    for (std::size_t c = 0; c < d; ++c) out += "," + format_double(f.point(i)[c]);
    out += "," + std::to_string(f.marks[i]) + "\n";
  }
  return out;
}

inline std::string field_csv_columns(std::size_t d) {
  std::string out = "run";
  for (std::size_t c = 1; c <= d; ++c) out += ",x" + std::to_string(c);
  return out + ",mark\n";
}

inline nlohmann::json to_json(const MarkedPointField& f) {
  nlohmann::json j;
  const std::size_t d = f.ambient.dim();
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < f.size(); ++i) pts.push_back(std::vector<double>(f.point(i), f.point(i) + d));
  j["points"] = pts;
  j["marks"] = f.marks;
  return j;
}

/// Writes content to path via a temporary sibling and rename; "-" means stdout.
inline void write_atomic(const std::string& path, const std::string& content) {
  if (path == "-" || path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(std::hash<std::string>{}(content) & 0xffffff);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename into " + target.string() + ": " + ec.message());
  }
}

}  // namespace fracppk
