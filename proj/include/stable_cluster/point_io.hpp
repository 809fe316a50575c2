#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"

namespace stable_cluster {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline PointSet parse_points_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<double> coords;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t fields = 0;
    std::size_t pos = 0;
    while (true) {
      auto comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      auto b = field.find_first_not_of(" \t");
      auto e = field.find_last_not_of(" \t");
      if (b == std::string::npos)
        throw IoError("empty field on line " + std::to_string(line_no));
      const char* lo = field.data() + b;
      const char* hi = field.data() + e + 1;
      if (*lo == '+') ++lo;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(lo, hi, v);
      if (ec != std::errc() || ptr != hi || !std::isfinite(v))
        throw IoError("bad number '" + field + "' on line " + std::to_string(line_no));
      coords.push_back(v);
      ++fields;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (dim == 0) dim = fields;
    if (fields != dim)
      throw IoError("line " + std::to_string(line_no) + " has " + std::to_string(fields) +
                    " fields, expected " + std::to_string(dim));
  }
  if (dim == 0) throw IoError("no points in input");
  return PointSet(dim, std::move(coords));
}

inline PointSet read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_points_csv(in);
}

inline void write_points_csv(std::ostream& out, const PointSet& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t a = 0; a < x.dim(); ++a) {
      if (a) out << ',';
      out << format_double(x.coord(i, a));
    }
    out << '\n';
  }
}

inline void write_points_csv(const std::string& path, const PointSet& x) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_points_csv(out, x);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace stable_cluster
