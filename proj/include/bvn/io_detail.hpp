#pragma once

#include <cstdio>
#include <string>

namespace bvn::detail {

// Shortest round-trip decimal form; keeps CSV/JSON output byte-stable.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace bvn::detail
