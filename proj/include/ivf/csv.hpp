#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace ivf {

/// Shortest-safe round-trip formatting for CSV cells; NaN is written as "NaN".
inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ivf
