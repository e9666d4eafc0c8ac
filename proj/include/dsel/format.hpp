#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace dsel {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// CSV cell: finite values as shortest round-trip decimals, everything else
// as the NA sentinel.
inline std::string csv_number(double v) {
  return std::isfinite(v) ? format_double(v) : std::string("NA");
}

}  // namespace dsel
