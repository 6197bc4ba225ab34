#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace bayesmix::format {

// Locale-independent general-format rendering.
inline std::string sig(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

/// Probabilities: 6 significant digits.
inline std::string prob(double v) { return sig(v, 6); }

/// Log values: 12 significant digits.
inline std::string logv(double v) { return sig(v, 12); }

/// Fixed-point with `places` decimals, for the short summary line.
inline std::string fixed(double v, int places) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, places);
  return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

}  // namespace bayesmix::format
