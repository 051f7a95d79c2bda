#ifndef IMOCA_TEXTIO_HPP
#define IMOCA_TEXTIO_HPP

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace imoca {

// Shortest decimal form that round-trips to the same double. Keeps persisted
// files byte-stable across reruns and exact on re-parse.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("parse_double: bad number '" + s + "'");
  }
  return v;
}

inline std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("parse_int: bad integer '" + s + "'");
  }
  return v;
}

}  // namespace imoca

#endif
