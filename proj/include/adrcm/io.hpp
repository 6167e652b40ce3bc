#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adrcm/error.hpp"
#include "adrcm/model.hpp"

namespace adrcm {

// Reals are written with 17 significant digits so they round-trip exactly.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that parses back to the same double.
inline std::string format_shortest(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline double parse_real(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw FormatError("expected a number for " + std::string(what) + ", got '" + s + "'");
  }
  if (used != s.size())
    throw FormatError("trailing characters in " + std::string(what) + ": '" + s + "'");
  return v;
}

// Writes `x,u` CSV. Lines starting with '#' carry metadata and precede the header.
inline void write_config_csv(std::ostream& out, const PointConfig& config,
                             std::span<const std::string> comments = {}) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "x,u\n";
  for (const auto& p : config.points()) out << format_real(p.x) << ',' << format_real(p.u) << '\n';
}

inline PointConfig read_config_csv(std::istream& in, const ModelParams& params) {
  std::string line;
  bool header = false;
  std::vector<MarkedPoint> pts;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header) {
      if (t != "x,u") throw FormatError("expected header 'x,u', got '" + t + "'");
      header = true;
      continue;
    }
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected two fields");
    pts.push_back({parse_real(std::string_view(t).substr(0, comma), "x"),
                   parse_real(std::string_view(t).substr(comma + 1), "u")});
  }
  if (!header) throw FormatError("missing 'x,u' header");
  return PointConfig(params, std::move(pts));
}

// Writes via a temporary file in the same directory, then renames over the target.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace adrcm
