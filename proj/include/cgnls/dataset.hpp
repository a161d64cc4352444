#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cgnls/core.hpp"

namespace cgnls {

inline constexpr const char* kDatasetHeader = "x,t,u1,v1,u2,v2";

namespace detail {

// %.17g round-trips IEEE doubles exactly.
inline void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline double parse_double(const std::string& field, const std::string& path, long line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw ConfigError(path + ":" + std::to_string(line) + ": bad numeric field '" + field + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline void write_dataset(const std::string& path, std::span<const FieldSample> rows) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_dataset: cannot open '" + path + "'");
  std::string buf = kDatasetHeader;
  buf += '\n';
  for (const auto& r : rows) {
    detail::append_g17(buf, r.point.x);
    buf += ',';
    detail::append_g17(buf, r.point.t);
    buf += ',';
    detail::append_g17(buf, r.u1);
    buf += ',';
    detail::append_g17(buf, r.v1);
    buf += ',';
    detail::append_g17(buf, r.u2);
    buf += ',';
    detail::append_g17(buf, r.v2);
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      f << buf;
      buf.clear();
    }
  }
  f << buf;
  if (!f) throw ConfigError("write_dataset: write to '" + path + "' failed");
}

inline std::vector<FieldSample> read_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("read_dataset: cannot open '" + path + "'");
  std::string line;
  long lineno = 0;
  if (!std::getline(f, line))
    throw ConfigError(path + ":1: empty dataset file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetHeader)
    throw ConfigError(path + ":1: expected header '" + std::string(kDatasetHeader) + "', got '" + line + "'");
  std::vector<FieldSample> rows;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 6)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 6 fields, got " +
                        std::to_string(fields.size()));
    FieldSample r;
    r.point.x = detail::parse_double(fields[0], path, lineno);
    r.point.t = detail::parse_double(fields[1], path, lineno);
    r.u1 = detail::parse_double(fields[2], path, lineno);
    r.v1 = detail::parse_double(fields[3], path, lineno);
    r.u2 = detail::parse_double(fields[4], path, lineno);
    r.v2 = detail::parse_double(fields[5], path, lineno);
    rows.push_back(r);
  }
  if (rows.empty())
    throw ConfigError(path + ": dataset has a header but no rows");
  return rows;
}

}  // namespace cgnls
