#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "bayesmix/version.hpp"

namespace bayesmix {

/// Machine-readable record of one CLI invocation. Field order in the
/// serialized form is lexicographic (nlohmann::json objects are sorted),
/// so identical inputs produce identical bytes apart from `timestamp`.
struct RunRecord {
  int schema_version = kRunRecordSchemaVersion;
  std::string command;
  nlohmann::json input = nlohmann::json::object();
  nlohmann::json result = nlohmann::json::object();
  std::string version = kVersion;
  std::string timestamp;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline void to_json(nlohmann::json& j, const RunRecord& r) {
  j = nlohmann::json{{"schema_version", r.schema_version},
                     {"command", r.command},
                     {"input", r.input},
                     {"result", r.result},
                     {"version", r.version},
                     {"timestamp", r.timestamp}};
}

inline void from_json(const nlohmann::json& j, RunRecord& r) {
  j.at("schema_version").get_to(r.schema_version);
  j.at("command").get_to(r.command);
  r.input = j.at("input");
  r.result = j.at("result");
  j.at("version").get_to(r.version);
  j.at("timestamp").get_to(r.timestamp);
}

/// JSON has no infinities; they are written as the strings "inf"/"-inf".
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace bayesmix
