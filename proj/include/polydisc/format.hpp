#pragma once

#include <cerrno>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "polydisc/errors.hpp"

namespace polydisc {

/// 17 significant digits: enough for a bit-exact double round trip.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_complex(std::complex<double> z) {
  return format_double(z.real()) + "," + format_double(z.imag());
}

inline std::string_view trim(std::string_view v) {
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t' || v.front() == '\r' || v.front() == '\n'))
    v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r' || v.back() == '\n'))
    v.remove_suffix(1);
  return v;
}

inline double parse_double(std::string_view text) {
  std::string s(trim(text));
  if (s.empty()) throw ConfigError("expected a number, got an empty string");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (*end != '\0') throw ConfigError("not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find(sep, pos);
    out.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

/// "re,im" or a bare real "re".
inline std::complex<double> parse_complex(std::string_view text) {
  auto parts = split(trim(text), ',');
  if (parts.size() == 1) return {parse_double(parts[0]), 0.0};
  if (parts.size() == 2) return {parse_double(parts[0]), parse_double(parts[1])};
  throw ConfigError("expected 're,im', got '" + std::string(text) + "'");
}

inline std::vector<double> parse_double_list(std::string_view text, char sep = ',') {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto p : split(text, sep)) out.push_back(parse_double(p));
  return out;
}

}  // namespace polydisc
