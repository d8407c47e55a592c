#pragma once

#include <charconv>
#include <string>

namespace bbjsr {

/// Shortest decimal that parses back to the same double.
inline std::string shortest(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace bbjsr
