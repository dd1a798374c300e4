#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mtqc {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, res.ptr);
}

// Value rounded to `digits` significant decimal digits (for tolerance checks
// phrased in significant figures).
inline double round_sig(double v, int digits) {
  if (digits < 1) throw std::invalid_argument("significant digits must be >= 1");
  if (v == 0.0 || !std::isfinite(v)) return v;
  double mag = std::pow(10.0, digits - 1 - std::floor(std::log10(std::fabs(v))));
  return std::round(v * mag) / mag;
}

// Fixed significant-digit rendering for human-facing tables.
inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

}  // namespace mtqc
