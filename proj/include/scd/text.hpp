#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace scd {

/// Shortest decimal form that round-trips the exact double. Keeps emitted
/// configs and CSVs both readable and bit-faithful on reload.
inline std::string fmt_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// RFC-4180 field quoting: wraps fields containing commas, quotes, or
/// newlines and doubles embedded quotes.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

}  // namespace scd
